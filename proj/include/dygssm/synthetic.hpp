#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dygssm/graph.hpp"

namespace dygssm {

// Recipe for a planted-pattern dynamic graph: a fixed set of pattern edges
// switches on every `period` snapshots and stays on for `persistence`
// consecutive snapshots; a static background and per-snapshot transient noise
// are overlaid on top. With base_rate = noise_rate = 0 the snapshots contain
// exactly the pattern on its schedule.
struct SyntheticSpec {
  int nodes = 60;
  int snapshots = 20;
  // Pattern edges. When `planted` is empty, `planted_count` distinct pairs are
  // sampled from the seed instead.
  std::vector<std::pair<int, int>> planted;
  int planted_count = 40;
  int period = 1;       // pattern recurs every `period` snapshots
  int persistence = 1;  // consecutive on-snapshots per recurrence
  double base_rate = 0.0;   // static background edge probability per pair
  double noise_rate = 0.0;  // per-snapshot transient edge probability per pair

  void validate() const;  // throws ConfigError
};

// Generated graph plus the ground truth needed by experiments: which edges
// were planted and at which snapshots the pattern is on.
struct SyntheticData {
  DynamicGraph graph;
  std::vector<std::pair<int, int>> planted;
  std::vector<bool> pattern_on;  // size T
};

// Deterministic in (spec, seed). Pattern selection, background, and noise use
// independent derived streams, so e.g. changing the noise rate does not move
// the planted pattern.
SyntheticData generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace dygssm
