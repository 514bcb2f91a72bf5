#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <set>

#include "doctest.h"
#include "dygssm/errors.hpp"
#include "dygssm/synthetic.hpp"

using namespace dygssm;

namespace {

std::set<std::pair<int, int>> edge_set(const Snapshot& s) {
  std::set<std::pair<int, int>> out;
  for (auto [u, v] : s.edges) out.emplace(std::min(u, v), std::max(u, v));
  return out;
}

}  // namespace

TEST_CASE("spec validation rejects bad fields") {
  SyntheticSpec s;
  s.nodes = 1;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = {};
  s.period = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = {};
  s.noise_rate = 1.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = {};
  s.planted = {{0, 0}};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = {};
  s.planted = {{0, 99}};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = {};
  s.nodes = 4;
  s.planted_count = 100;  // only 6 pairs exist
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("zero noise gives exactly the planted schedule") {
  SyntheticSpec s;
  s.nodes = 10;
  s.snapshots = 6;
  s.planted = {{0, 1}, {2, 3}, {4, 5}};
  s.period = 2;
  s.persistence = 1;
  SyntheticData d = generate_synthetic(s, 7);

  REQUIRE(d.graph.snapshot_count() == 6);
  const std::set<std::pair<int, int>> want(s.planted.begin(), s.planted.end());
  for (int t = 0; t < 6; ++t) {
    CHECK(d.pattern_on[t] == (t % 2 == 0));
    if (t % 2 == 0)
      CHECK(edge_set(d.graph.snapshots[t]) == want);
    else
      CHECK(d.graph.snapshots[t].edges.empty());
  }
}

TEST_CASE("period 1 keeps the pattern on in every snapshot") {
  SyntheticSpec s;
  s.nodes = 20;
  s.snapshots = 5;
  s.planted_count = 7;
  s.period = 1;
  s.noise_rate = 0.01;
  SyntheticData d = generate_synthetic(s, 3);

  CHECK(static_cast<int>(d.planted.size()) == 7);
  for (int t = 0; t < 5; ++t) {
    CHECK(d.pattern_on[t]);
    for (auto [u, v] : d.planted) CHECK(d.graph.snapshots[t].has_edge(u, v));
  }
}

TEST_CASE("persistence widens the on-window") {
  SyntheticSpec s;
  s.nodes = 6;
  s.snapshots = 9;
  s.planted = {{1, 2}};
  s.period = 3;
  s.persistence = 2;
  SyntheticData d = generate_synthetic(s, 1);
  for (int t = 0; t < 9; ++t) CHECK(d.pattern_on[t] == (t % 3 < 2));
}

TEST_CASE("same seed reproduces, different seed moves the pattern") {
  SyntheticSpec s;
  s.nodes = 30;
  s.snapshots = 8;
  s.planted_count = 12;
  s.noise_rate = 0.05;
  SyntheticData a = generate_synthetic(s, 11);
  SyntheticData b = generate_synthetic(s, 11);
  SyntheticData c = generate_synthetic(s, 12);

  CHECK(a.planted == b.planted);
  for (int t = 0; t < 8; ++t)
    CHECK(edge_set(a.graph.snapshots[t]) == edge_set(b.graph.snapshots[t]));
  CHECK(a.planted != c.planted);
}

TEST_CASE("noise changes do not move the planted pattern") {
  SyntheticSpec s;
  s.nodes = 25;
  s.snapshots = 4;
  s.planted_count = 10;
  SyntheticData quiet = generate_synthetic(s, 5);
  s.noise_rate = 0.1;
  SyntheticData noisy = generate_synthetic(s, 5);

  CHECK(quiet.planted == noisy.planted);
  // Noise only adds edges on top of the pattern.
  for (int t = 0; t < 4; ++t) {
    auto q = edge_set(quiet.graph.snapshots[t]);
    auto n = edge_set(noisy.graph.snapshots[t]);
    CHECK(std::includes(n.begin(), n.end(), q.begin(), q.end()));
    CHECK(n.size() > q.size());  // 0.1 over 300 pairs: vanishing miss chance
  }
}

TEST_CASE("static background appears in every snapshot") {
  SyntheticSpec s;
  s.nodes = 40;
  s.snapshots = 6;
  s.planted_count = 5;
  s.period = 3;  // pattern off at t % 3 != 0
  s.base_rate = 0.05;
  SyntheticData d = generate_synthetic(s, 9);

  auto off = edge_set(d.graph.snapshots[1]);  // pattern off: background only
  CHECK(!off.empty());
  for (int t = 0; t < 6; ++t) {
    auto es = edge_set(d.graph.snapshots[t]);
    CHECK(std::includes(es.begin(), es.end(), off.begin(), off.end()));
  }
}
