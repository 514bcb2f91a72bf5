#include "dygssm/synthetic.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "dygssm/errors.hpp"
#include "dygssm/rng.hpp"

namespace dygssm {

void SyntheticSpec::validate() const {
  if (nodes < 2) throw ConfigError("synthetic graph needs at least 2 nodes");
  if (snapshots < 2) throw ConfigError("synthetic graph needs at least 2 snapshots");
  if (period < 1) throw ConfigError("pattern period must be >= 1");
  if (persistence < 1) throw ConfigError("pattern persistence must be >= 1");
  if (base_rate < 0.0 || base_rate >= 1.0) throw ConfigError("base rate must be in [0, 1)");
  if (noise_rate < 0.0 || noise_rate >= 1.0) throw ConfigError("noise rate must be in [0, 1)");
  const std::int64_t max_pairs = static_cast<std::int64_t>(nodes) * (nodes - 1) / 2;
  if (planted.empty()) {
    if (planted_count < 1) throw ConfigError("planted edge count must be >= 1");
    if (planted_count > max_pairs)
      throw ConfigError("cannot plant " + std::to_string(planted_count) + " edges among " +
                        std::to_string(max_pairs) + " pairs");
  }
  for (const auto& [u, v] : planted) {
    if (u < 0 || u >= nodes || v < 0 || v >= nodes)
      throw ConfigError("planted edge (" + std::to_string(u) + "," + std::to_string(v) +
                        ") outside universe");
    if (u == v) throw ConfigError("planted self-loop on node " + std::to_string(u));
  }
}

SyntheticData generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  const Rng root(seed);

  SyntheticData out;
  // Pattern edges, canonicalized to u < v and deduplicated.
  std::set<std::pair<int, int>> pattern;
  if (!spec.planted.empty()) {
    for (auto [u, v] : spec.planted) pattern.emplace(std::min(u, v), std::max(u, v));
  } else {
    Rng pick = root.derive(0x5e17);
    while (static_cast<int>(pattern.size()) < spec.planted_count) {
      const int u = static_cast<int>(pick.next_below(spec.nodes));
      const int v = static_cast<int>(pick.next_below(spec.nodes));
      if (u != v) pattern.emplace(std::min(u, v), std::max(u, v));
    }
  }
  out.planted.assign(pattern.begin(), pattern.end());

  std::vector<std::pair<int, int>> background;
  if (spec.base_rate > 0.0) {
    Rng base = root.derive(0x5e18);
    for (int u = 0; u < spec.nodes; ++u)
      for (int v = u + 1; v < spec.nodes; ++v)
        if (base.next_double() < spec.base_rate && !pattern.count({u, v}))
          background.emplace_back(u, v);
  }

  std::vector<std::vector<std::pair<int, int>>> edges(spec.snapshots);
  out.pattern_on.resize(spec.snapshots);
  for (int t = 0; t < spec.snapshots; ++t) {
    const bool on = (t % spec.period) < spec.persistence;
    out.pattern_on[t] = on;
    if (on) edges[t].assign(out.planted.begin(), out.planted.end());
    edges[t].insert(edges[t].end(), background.begin(), background.end());
    if (spec.noise_rate > 0.0) {
      Rng noise = root.derive(0x5e19, static_cast<std::uint64_t>(t));
      std::set<std::pair<int, int>> present(edges[t].begin(), edges[t].end());
      for (int u = 0; u < spec.nodes; ++u)
        for (int v = u + 1; v < spec.nodes; ++v)
          if (noise.next_double() < spec.noise_rate && !present.count({u, v}))
            edges[t].emplace_back(u, v);
    }
  }
  out.graph = graph_from_snapshot_edges(edges, spec.nodes);
  return out;
}

}  // namespace dygssm
