#include "dygssm/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "dygssm/errors.hpp"

namespace dygssm {

bool Snapshot::has_edge(int u, int v) const {
  const auto& nb = neighbors[u];
  return std::binary_search(nb.begin(), nb.end(), v);
}

namespace {

CsrMatrix csr_from_neighbors(const std::vector<std::vector<int>>& neighbors) {
  CsrMatrix m;
  m.rows = static_cast<int>(neighbors.size());
  m.cols = m.rows;
  m.row_ptr.assign(m.rows + 1, 0);
  for (int r = 0; r < m.rows; ++r) m.row_ptr[r + 1] = m.row_ptr[r] + neighbors[r].size();
  m.col_idx.reserve(m.row_ptr[m.rows]);
  for (const auto& nb : neighbors) m.col_idx.insert(m.col_idx.end(), nb.begin(), nb.end());
  m.values.assign(m.col_idx.size(), 1.0);
  return m;
}

}  // namespace

DynamicGraph partition_snapshots(const std::vector<TimedEdge>& edges, int T, bool cumulative) {
  if (edges.empty()) throw DataError("cannot partition an empty edge list");
  if (T < 2) throw ConfigError("snapshot count must be at least 2, got " + std::to_string(T));

  double lo = edges.front().ts, hi = edges.front().ts;
  int max_id = 0;
  for (const auto& e : edges) {
    if (e.u < 0 || e.v < 0) throw DataError("negative node id in edge list");
    if (e.u == e.v) throw DataError("self-loop on node " + std::to_string(e.u));
    lo = std::min(lo, e.ts);
    hi = std::max(hi, e.ts);
    max_id = std::max({max_id, e.u, e.v});
  }
  if (lo == hi) throw ConfigError("degenerate time range: all timestamps equal");

  DynamicGraph g;
  g.node_count = max_id + 1;
  const double width = (hi - lo) / T;
  std::vector<std::vector<TimedEdge>> bins(T);
  for (const auto& e : edges) {
    int idx = static_cast<int>((e.ts - lo) / width);
    idx = std::min(std::max(idx, 0), T - 1);
    bins[idx].push_back(e);
  }

  std::set<int> active;
  std::vector<std::set<int>> adj(g.node_count);  // carried across bins when cumulative
  g.snapshots.resize(T);
  for (int t = 0; t < T; ++t) {
    Snapshot& s = g.snapshots[t];
    s.index = t;
    s.node_count = g.node_count;
    if (!cumulative)
      for (auto& nb : adj) nb.clear();
    for (const auto& e : bins[t]) {
      s.edges.emplace_back(e.u, e.v);
      active.insert(e.u);
      active.insert(e.v);
      adj[e.u].insert(e.v);
      adj[e.v].insert(e.u);
    }
    if (cumulative && t > 0) {
      const auto& prev = g.snapshots[t - 1].edges;
      s.edges.insert(s.edges.begin(), prev.begin(), prev.end());
    }
    s.nodes.assign(active.begin(), active.end());
    s.neighbors.resize(g.node_count);
    for (int u = 0; u < g.node_count; ++u) s.neighbors[u].assign(adj[u].begin(), adj[u].end());
    s.adjacency = csr_from_neighbors(s.neighbors);
  }
  return g;
}

DynamicGraph graph_from_snapshot_edges(
    const std::vector<std::vector<std::pair<int, int>>>& edges_by_snapshot, int node_count) {
  if (node_count < 1) throw ConfigError("node count must be positive");
  if (edges_by_snapshot.empty()) throw ConfigError("need at least one snapshot");

  DynamicGraph g;
  g.node_count = node_count;
  const int T = static_cast<int>(edges_by_snapshot.size());
  g.snapshots.resize(T);
  std::set<int> active;
  std::vector<std::set<int>> adj(node_count);
  for (int t = 0; t < T; ++t) {
    Snapshot& s = g.snapshots[t];
    s.index = t;
    s.node_count = node_count;
    for (auto& nb : adj) nb.clear();
    for (const auto& [u, v] : edges_by_snapshot[t]) {
      if (u < 0 || u >= node_count || v < 0 || v >= node_count)
        throw DataError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                        ") outside universe of " + std::to_string(node_count) + " nodes");
      if (u == v) throw DataError("self-loop on node " + std::to_string(u));
      s.edges.emplace_back(u, v);
      active.insert(u);
      active.insert(v);
      adj[u].insert(v);
      adj[v].insert(u);
    }
    s.nodes.assign(active.begin(), active.end());
    s.neighbors.resize(node_count);
    for (int u = 0; u < node_count; ++u) s.neighbors[u].assign(adj[u].begin(), adj[u].end());
    s.adjacency = csr_from_neighbors(s.neighbors);
  }
  return g;
}

NormalizedAdjacency normalize_adjacency(const Snapshot& snapshot) {
  if (!snapshot.adjacency.is_symmetric())
    throw DataError("adjacency of snapshot " + std::to_string(snapshot.index) +
                    " is not symmetric");
  NormalizedAdjacency out;
  out.degree.reserve(snapshot.node_count);
  for (int u = 0; u < snapshot.node_count; ++u) out.degree.push_back(snapshot.degree(u));

  out.matrix = snapshot.adjacency;
  for (int r = 0; r < out.matrix.rows; ++r) {
    for (std::int64_t k = out.matrix.row_ptr[r]; k < out.matrix.row_ptr[r + 1]; ++k) {
      const int c = out.matrix.col_idx[k];
      out.matrix.values[k] =
          1.0 / std::sqrt(static_cast<double>(out.degree[r]) * static_cast<double>(out.degree[c]));
    }
  }
  return out;
}

std::vector<int> negative_sample(const Snapshot& snapshot, int u, int k, Rng& rng) {
  if (u < 0 || u >= snapshot.node_count)
    throw DataError("node " + std::to_string(u) + " outside the universe");
  if (snapshot.degree(u) == 0)
    throw DataError("node " + std::to_string(u) + " has no edge in snapshot " +
                    std::to_string(snapshot.index));
  if (k <= 0) throw ContractError("negative sample count must be positive");

  std::vector<int> eligible;
  eligible.reserve(snapshot.node_count);
  for (int v = 0; v < snapshot.node_count; ++v)
    if (v != u && !snapshot.has_edge(u, v)) eligible.push_back(v);
  if (eligible.empty())
    throw DataError("no eligible negatives for node " + std::to_string(u) + " in snapshot " +
                    std::to_string(snapshot.index));

  std::vector<int> out;
  out.reserve(k);
  const auto m = static_cast<std::int64_t>(eligible.size());
  if (m >= k) {
    // Partial Fisher-Yates: distinct draws, order determined by the stream.
    for (int i = 0; i < k; ++i) {
      const auto j = i + rng.next_below(m - i);
      std::swap(eligible[i], eligible[j]);
      out.push_back(eligible[i]);
    }
  } else {
    for (int i = 0; i < k; ++i) out.push_back(eligible[rng.next_below(m)]);
  }
  return out;
}

}  // namespace dygssm
