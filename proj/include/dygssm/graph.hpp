#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dygssm/rng.hpp"
#include "dygssm/sparse.hpp"

namespace dygssm {

struct TimedEdge {
  int u = 0;
  int v = 0;
  double ts = 0.0;
};

// One time bin of the dynamic graph. `edges` keeps the input edges assigned
// to this bin verbatim (duplicates and direction preserved); `adjacency` is
// the symmetrized, deduplicated 0/1 operator over the full node universe.
struct Snapshot {
  int index = 0;
  int node_count = 0;                     // size of the global universe n
  std::vector<int> nodes;                 // ids active up to and including t, sorted
  std::vector<std::pair<int, int>> edges;
  std::vector<std::vector<int>> neighbors;  // sorted unique per node, length n
  CsrMatrix adjacency;

  bool has_edge(int u, int v) const;
  int degree(int u) const { return static_cast<int>(neighbors[u].size()); }
};

struct DynamicGraph {
  std::vector<Snapshot> snapshots;
  int node_count = 0;
  int feature_dim = 0;  // m; set by the caller, features live with the model

  int snapshot_count() const { return static_cast<int>(snapshots.size()); }
};

struct NormalizedAdjacency {
  CsrMatrix matrix;                 // A[i][j] / sqrt(deg(i) deg(j))
  std::vector<std::int64_t> degree;
};

// Assigns each edge to one of T equal-width time bins over [min_ts, max_ts]
// (last bin closed above). With cumulative = true, snapshot t additionally
// carries every edge from bins 0..t-1.
DynamicGraph partition_snapshots(const std::vector<TimedEdge>& edges, int T,
                                 bool cumulative = false);

// Builds a DynamicGraph from explicit per-snapshot edge lists over a fixed
// universe, bypassing time binning (generators and snapshot files know their
// assignment already). Empty snapshots are allowed.
DynamicGraph graph_from_snapshot_edges(
    const std::vector<std::vector<std::pair<int, int>>>& edges_by_snapshot, int node_count);

// Symmetric degree normalization without self-loops; zero-degree rows and
// columns stay zero. Throws if the adjacency is not symmetric.
NormalizedAdjacency normalize_adjacency(const Snapshot& snapshot);

// k uniform non-neighbors of u (v != u, (u,v) not an edge). Draws distinct
// nodes when enough candidates exist, otherwise samples with replacement;
// a node with the full universe as neighborhood is an error, as is a node
// with no edge in the snapshot.
std::vector<int> negative_sample(const Snapshot& snapshot, int u, int k, Rng& rng);

}  // namespace dygssm
