#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dygssm/graph.hpp"
#include "dygssm/rng.hpp"

namespace dygssm {

// Second-order walk knobs. q steers toward (q < 1) or away from (q > 1)
// nodes two hops from the previous position; p penalizes immediate returns.
struct WalkConfig {
  double p = 1.0;
  double q = 2.0;
  int walks_per_node = 50;
  int walk_length = 5;
  int top_k = 5;

  void validate() const;
};

// Per-snapshot, per-source representative node sequences, precomputed once
// and reused by the global encoder across epochs.
struct WalkCache {
  // summaries[t][u]: at most top_k node ids, most frequent first.
  std::vector<std::vector<std::vector<int>>> summaries;
  int top_k = 0;

  int snapshot_count() const { return static_cast<int>(summaries.size()); }
  const std::vector<int>& summary(int t, int u) const { return summaries[t][u]; }

  bool operator==(const WalkCache&) const = default;
};

// One biased walk: position 0 is the source, followed by walk_length steps.
// From current node x reached from t, neighbor v carries unnormalized weight
// 1/p if v = t, 1 if v is adjacent to t, 1/q otherwise; the first step is
// uniform. An isolated source yields the singleton path [source].
std::vector<int> biased_walk(const Snapshot& snapshot, int source, const WalkConfig& cfg,
                             Rng& rng);

// Runs walks_per_node walks and returns the top_k most frequently visited
// nodes (source occurrences excluded), ties broken toward smaller ids.
// May return fewer than top_k entries when the reachable set is small.
std::vector<int> walk_summary(const Snapshot& snapshot, int source, const WalkConfig& cfg,
                              Rng& rng);

// Summaries for every node of every snapshot. Streams are derived per
// (snapshot, source) from `seed`, so the result is independent of
// evaluation order.
WalkCache build_cache(const DynamicGraph& graph, const WalkConfig& cfg, std::uint64_t seed);

// CSV interchange: rows `snapshot,source,n1,...` with one row per node per
// snapshot; empty summaries produce rows with two fields.
void save_cache(const WalkCache& cache, const std::string& path);
WalkCache load_cache(const std::string& path);

}  // namespace dygssm
