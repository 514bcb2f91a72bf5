#pragma once

#include <cstdint>

namespace dygssm {

// Deterministic splitmix64 stream. Used everywhere instead of std::
// distributions so that sampled values are identical across platforms and
// standard library versions; reproducibility of runs depends on it.
//
// derive() produces an independent stream from the root seed and up to three
// tags. Derived streams do not depend on how much the parent stream has been
// consumed, so per-node / per-snapshot sampling is order independent.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : root_(seed), state_(mix(seed)) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of mantissa.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Uniform integer in [0, n). Rejection sampling keeps the draw unbiased.
  std::int64_t next_below(std::int64_t n) {
    const auto un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t r;
    do {
      r = next_u64();
    } while (r >= limit);
    return static_cast<std::int64_t>(r % un);
  }

  Rng derive(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const {
    std::uint64_t s = root_;
    s = mix(s ^ mix(a + 0x01));
    s = mix(s ^ mix(b + 0x9e));
    s = mix(s ^ mix(c + 0xc3));
    return Rng(s);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t root_;
  std::uint64_t state_;
};

}  // namespace dygssm
