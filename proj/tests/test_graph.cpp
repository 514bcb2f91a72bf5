#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "dygssm/errors.hpp"
#include "dygssm/graph.hpp"
#include "dygssm/rng.hpp"

using namespace dygssm;

namespace {

std::vector<TimedEdge> chain_edges() {
  // ts 1..10 along a path so both bins are non-empty.
  std::vector<TimedEdge> edges;
  for (int i = 0; i < 10; ++i) edges.push_back({i, i + 1, static_cast<double>(i + 1)});
  return edges;
}

Snapshot single_snapshot(const std::vector<TimedEdge>& edges) {
  // Convenience: add a sacrificial second bin and take the first.
  auto shifted = edges;
  return partition_snapshots(shifted, 2).snapshots[0];
}

}  // namespace

TEST_CASE("equal-width binning splits ts 1..10 into [1,5.5) and [5.5,10]") {
  DynamicGraph g = partition_snapshots(chain_edges(), 2);
  REQUIRE(g.snapshot_count() == 2);
  CHECK(g.snapshots[0].edges.size() == 5);  // ts 1,2,3,4,5
  CHECK(g.snapshots[1].edges.size() == 5);  // ts 5.5..10 -> 6,7,8,9,10
  CHECK(g.node_count == 11);
  // Last bin is closed above: the ts = 10 edge lands in snapshot 1.
  CHECK(g.snapshots[1].has_edge(9, 10));
}

TEST_CASE("partition error taxonomy") {
  CHECK_THROWS_AS(partition_snapshots({}, 2), DataError);
  CHECK_THROWS_AS(partition_snapshots(chain_edges(), 1), ConfigError);
  CHECK_THROWS_AS(partition_snapshots({{0, 1, 5.0}}, 2), ConfigError);  // degenerate range
  CHECK_THROWS_AS(partition_snapshots({{3, 3, 1.0}, {0, 1, 2.0}}, 2), DataError);  // self-loop
}

TEST_CASE("total edge count is preserved and duplicates are kept") {
  std::vector<TimedEdge> edges = {{0, 1, 1.0}, {0, 1, 1.0}, {1, 0, 2.0}, {1, 2, 9.0}};
  DynamicGraph g = partition_snapshots(edges, 3);
  std::size_t total = 0;
  for (const auto& s : g.snapshots) total += s.edges.size();
  CHECK(total == edges.size());
  // Adjacency dedupes and symmetrizes.
  CHECK(g.snapshots[0].degree(0) == 1);
  CHECK(g.snapshots[0].has_edge(1, 0));
}

TEST_CASE("active node set accumulates across snapshots") {
  std::vector<TimedEdge> edges = {{0, 1, 0.0}, {2, 3, 10.0}};
  DynamicGraph g = partition_snapshots(edges, 2);
  CHECK(g.snapshots[0].nodes == std::vector<int>{0, 1});
  CHECK(g.snapshots[1].nodes == std::vector<int>{0, 1, 2, 3});
  // Bin-only mode: the first bin's edge is absent from the second snapshot.
  CHECK_FALSE(g.snapshots[1].has_edge(0, 1));
}

TEST_CASE("cumulative mode carries earlier edges forward") {
  std::vector<TimedEdge> edges = {{0, 1, 0.0}, {2, 3, 10.0}};
  DynamicGraph g = partition_snapshots(edges, 2, /*cumulative=*/true);
  CHECK(g.snapshots[1].has_edge(0, 1));
  CHECK(g.snapshots[1].edges.size() == 2);
}

TEST_CASE("normalization of a single undirected edge is the identity swap") {
  Snapshot s = single_snapshot({{0, 1, 0.0}, {0, 1, 1.0}});
  NormalizedAdjacency norm = normalize_adjacency(s);
  auto dense = norm.matrix.to_dense();
  CHECK(dense[0 * 2 + 1] == doctest::Approx(1.0));
  CHECK(dense[1 * 2 + 0] == doctest::Approx(1.0));
  CHECK(dense[0] == 0.0);
  CHECK(dense[3] == 0.0);
}

TEST_CASE("triangle normalizes to one half off-diagonal") {
  Snapshot s = single_snapshot({{0, 1, 0.0}, {1, 2, 0.0}, {0, 2, 0.0}, {0, 1, 1.0}});
  NormalizedAdjacency norm = normalize_adjacency(s);
  auto dense = norm.matrix.to_dense();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      CHECK(dense[r * 3 + c] == doctest::Approx(r == c ? 0.0 : 0.5));
}

TEST_CASE("isolated node keeps an all-zero row and column") {
  // Node 3 only appears in the second bin, so it is isolated in the first.
  Snapshot s = partition_snapshots({{0, 1, 0.0}, {1, 2, 0.0}, {0, 2, 0.0}, {3, 0, 1.0}}, 2)
                   .snapshots[0];
  NormalizedAdjacency norm = normalize_adjacency(s);
  CHECK(norm.degree[3] == 0);
  auto dense = norm.matrix.to_dense();
  for (int i = 0; i < 4; ++i) {
    CHECK(dense[3 * 4 + i] == 0.0);
    CHECK(dense[i * 4 + 3] == 0.0);
  }
}

TEST_CASE("normalized row sums match a brute-force dense computation") {
  Rng rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 8 + static_cast<int>(rng.next_below(13));  // up to 20
    std::vector<TimedEdge> edges;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (rng.next_double() < 0.3) edges.push_back({u, v, rng.uniform(0.0, 100.0)});
    edges.push_back({0, 1, 0.0});
    edges.push_back({n - 2, n - 1, 100.0});
    DynamicGraph g = partition_snapshots(edges, 2);
    for (const auto& s : g.snapshots) {
      NormalizedAdjacency norm = normalize_adjacency(s);
      auto dense = norm.matrix.to_dense();
      for (int i = 0; i < g.node_count; ++i) {
        double expected = 0.0;
        for (int j = 0; j < g.node_count; ++j)
          if (s.has_edge(i, j))
            expected += 1.0 / std::sqrt(static_cast<double>(s.degree(i)) * s.degree(j));
        double got = 0.0;
        for (int j = 0; j < g.node_count; ++j) got += dense[i * g.node_count + j];
        CHECK(got == doctest::Approx(expected).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("negative samples avoid u and its neighbors, exhaustively") {
  Rng root(77);
  for (int trial = 0; trial < 10; ++trial) {
    Rng setup = root.derive(1, trial);
    const int n = 5 + static_cast<int>(setup.next_below(46));  // up to 50
    std::vector<TimedEdge> edges;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (setup.next_double() < 0.2) edges.push_back({u, v, setup.uniform(0.0, 10.0)});
    edges.push_back({0, 1, 0.0});
    edges.push_back({0, 2, 10.0});
    DynamicGraph g = partition_snapshots(edges, 2);
    for (const auto& s : g.snapshots) {
      for (int u : s.nodes) {
        if (s.degree(u) == 0 || s.degree(u) >= s.node_count - 1) continue;
        Rng stream = root.derive(2, trial, u);
        auto negs = negative_sample(s, u, 7, stream);
        REQUIRE(negs.size() == 7);
        for (int v : negs) {
          CHECK(v != u);
          CHECK_FALSE(s.has_edge(u, v));
        }
      }
    }
  }
}

TEST_CASE("enough candidates yields distinct negatives") {
  // 1002-node snapshot where node 0 has exactly one neighbor.
  std::vector<TimedEdge> edges = {{0, 1, 0.0}};
  for (int v = 2; v < 1002; ++v) edges.push_back({1, v, 1.0});
  Snapshot s = partition_snapshots(edges, 2, /*cumulative=*/true).snapshots[1];
  Rng rng(5);
  auto negs = negative_sample(s, 0, 1000, rng);
  std::set<int> uniq(negs.begin(), negs.end());
  CHECK(uniq.size() == 1000);
  CHECK(uniq.count(0) == 0);
  CHECK(uniq.count(1) == 0);
}

TEST_CASE("negative sampling error and fallback regimes") {
  // Star: the center is adjacent to every other node.
  std::vector<TimedEdge> edges;
  for (int v = 1; v < 6; ++v) edges.push_back({0, v, static_cast<double>(v)});
  Snapshot s = partition_snapshots(edges, 2, /*cumulative=*/true).snapshots[1];
  Rng rng(5);
  CHECK_THROWS_AS(negative_sample(s, 0, 3, rng), DataError);

  // Leaf 1 has 4 eligible nodes; asking for 10 falls back to replacement.
  auto negs = negative_sample(s, 1, 10, rng);
  CHECK(negs.size() == 10);
  for (int v : negs) CHECK((v >= 2 && v <= 5));

  // A node without any edge in the snapshot is rejected.
  Snapshot early = partition_snapshots({{0, 1, 0.0}, {2, 3, 1.0}}, 2).snapshots[0];
  CHECK_THROWS_AS(negative_sample(early, 2, 1, rng), DataError);
}

TEST_CASE("negative sampling is deterministic per seed") {
  Snapshot s = single_snapshot(chain_edges());
  Rng a(99), b(99);
  CHECK(negative_sample(s, 2, 5, a) == negative_sample(s, 2, 5, b));
  Rng c(100);
  CHECK(negative_sample(s, 2, 5, c) != negative_sample(s, 2, 5, a));
}
