#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dygssm/errors.hpp"
#include "dygssm/eval.hpp"
#include "dygssm/rng.hpp"

using namespace dygssm;

namespace {

// Independent sort-and-scan oracle for the 1-based mid-rank of the positive.
int rank_oracle(const RankingCase& c) {
  std::vector<double> sorted = c.negatives;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  int greater = 0, tied = 0;
  for (double s : sorted) {
    if (s > c.positive)
      ++greater;
    else if (s == c.positive)
      ++tied;
    else
      break;  // sorted descending: nothing further can tie or beat
  }
  return 1 + greater + tied / 2;
}

// O(n^2) pair-counting oracle for AUC.
double auc_oracle(const std::vector<double>& scores, const std::vector<int>& labels) {
  double wins = 0.0;
  long pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j])
        wins += 1.0;
      else if (scores[i] == scores[j])
        wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

}  // namespace

TEST_CASE("rank handles clear wins, losses and ties") {
  CHECK(rank_positive({0.9, {0.5, 0.2, 0.1}}) == 1);
  CHECK(rank_positive({0.5, {0.7, 0.6, 0.4}}) == 3);
  CHECK(rank_positive({0.5, {0.5, 0.5}}) == 2);  // 1 + 0 + floor(2/2)
  CHECK_THROWS_AS(rank_positive({0.5, {}}), ContractError);
}

TEST_CASE("mrr and recall basics") {
  std::vector<RankingCase> perfect = {{0.9, {0.1, 0.2}}, {0.8, {0.0, 0.5}}};
  CHECK(mrr(perfect) == doctest::Approx(1.0));
  CHECK(recall_at_k(perfect, 10) == doctest::Approx(1.0));

  std::vector<RankingCase> rank4 = {{0.5, {0.9, 0.8, 0.7, 0.1}}};
  CHECK(mrr(rank4) == doctest::Approx(0.25));
  CHECK(recall_at_k(rank4, 3) == 0.0);
  CHECK(recall_at_k(rank4, 4) == 1.0);

  CHECK_THROWS_AS(mrr({}), ContractError);
  CHECK_THROWS_AS(recall_at_k({}, 10), ContractError);
}

TEST_CASE("one hundred random cases match the sort-and-scan oracle exactly") {
  Rng rng(606);
  for (int i = 0; i < 100; ++i) {
    RankingCase c;
    c.positive = rng.next_double();
    const int k = 1 + static_cast<int>(rng.next_below(200));
    const bool force_ties = rng.next_double() < 0.4;
    for (int j = 0; j < k; ++j) {
      double s = rng.next_double();
      if (force_ties && rng.next_double() < 0.3) s = c.positive;  // exact tie
      c.negatives.push_back(s);
    }
    CHECK(rank_positive(c) == rank_oracle(c));
  }
}

TEST_CASE("recall is non-decreasing in k and all metrics stay in [0,1]") {
  Rng rng(607);
  std::vector<RankingCase> cases;
  for (int i = 0; i < 40; ++i) {
    RankingCase c;
    c.positive = rng.next_double();
    for (int j = 0; j < 30; ++j) c.negatives.push_back(rng.next_double());
    cases.push_back(c);
  }
  double prev = 0.0;
  for (int k = 1; k <= 31; ++k) {
    const double r = recall_at_k(cases, k);
    CHECK(r >= prev);
    CHECK(r <= 1.0);
    prev = r;
  }
  const double m = mrr(cases);
  CHECK(m >= 0.0);
  CHECK(m <= 1.0);
}

TEST_CASE("fewer negatives never lowers a matched case's reciprocal rank") {
  Rng rng(608);
  for (int i = 0; i < 20; ++i) {
    RankingCase big;
    big.positive = rng.next_double();
    for (int j = 0; j < 1000; ++j) big.negatives.push_back(rng.next_double());
    RankingCase small = big;
    small.negatives.resize(50);
    CHECK(rank_positive(small) <= rank_positive(big));
  }
}

TEST_CASE("auc basics") {
  CHECK(auc({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}) == doctest::Approx(1.0));
  CHECK(auc({0.5, 0.5, 0.5, 0.5}, {1, 0, 1, 0}) == doctest::Approx(0.5));
  CHECK(auc({0.1, 0.2, 0.8, 0.9}, {1, 1, 0, 0}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(auc({0.1, 0.2}, {1, 1}), DataError);
}

TEST_CASE("six-point hand case and random sets match the pair-counting oracle") {
  std::vector<double> scores = {0.9, 0.7, 0.7, 0.5, 0.3, 0.3};
  std::vector<int> labels = {1, 0, 1, 0, 1, 0};
  CHECK(auc(scores, labels) == doctest::Approx(auc_oracle(scores, labels)).epsilon(1e-12));

  Rng rng(609);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> s;
    std::vector<int> l;
    const int n = 4 + static_cast<int>(rng.next_below(40));
    bool saw[2] = {false, false};
    for (int i = 0; i < n; ++i) {
      // Coarse grid forces plenty of exact ties.
      s.push_back(std::floor(rng.next_double() * 8.0) / 8.0);
      l.push_back(static_cast<int>(rng.next_below(2)));
      saw[l.back()] = true;
    }
    if (!saw[0] || !saw[1]) continue;
    CHECK(auc(s, l) == doctest::Approx(auc_oracle(s, l)).epsilon(1e-12));
  }
}

TEST_CASE("auc is invariant under strictly monotone score transforms") {
  Rng rng(610);
  std::vector<double> s;
  std::vector<int> l;
  for (int i = 0; i < 60; ++i) {
    s.push_back(rng.uniform(-3.0, 3.0));
    l.push_back(static_cast<int>(rng.next_below(2)));
  }
  l[0] = 1;
  l[1] = 0;
  const double base = auc(s, l);
  std::vector<double> affine = s, squashed = s;
  for (auto& v : affine) v = 2.0 * v + 1.0;
  for (auto& v : squashed) v = 1.0 / (1.0 + std::exp(-v));
  CHECK(auc(affine, l) == doctest::Approx(base).epsilon(1e-12));
  CHECK(auc(squashed, l) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("average precision: perfect ranking and a hand-checked mixed order") {
  CHECK(average_precision({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}) == doctest::Approx(1.0));
  // Order: 0.9(P), 0.8(N), 0.6(P), 0.2(N) -> precisions at hits: 1/1, 2/3.
  CHECK(average_precision({0.9, 0.8, 0.6, 0.2}, {1, 0, 1, 0}) ==
        doctest::Approx((1.0 + 2.0 / 3.0) / 2.0).epsilon(1e-12));
  CHECK_THROWS_AS(average_precision({0.1}, {1}), DataError);
}

TEST_CASE("accuracy thresholds at one half by default") {
  CHECK(accuracy({0.9, 0.4, 0.6, 0.1}, {1, 0, 0, 1}) == doctest::Approx(0.5));
  CHECK(accuracy({0.9, 0.4}, {1, 0}) == doctest::Approx(1.0));
  // Scores exactly at the threshold predict the positive class.
  CHECK(accuracy({0.5}, {1}) == doctest::Approx(1.0));
  CHECK(accuracy({0.5, 0.5}, {1, 0}, 0.7) == doctest::Approx(0.5));
}

TEST_CASE("end-to-end evaluation is deterministic and ranks a planted edge first") {
  // Universe of 8 nodes; target snapshot holds edges (0,1) and (2,3).
  std::vector<TimedEdge> edges = {{4, 5, 0.0}, {0, 1, 10.0}, {2, 3, 10.0}};
  DynamicGraph g = partition_snapshots(edges, 2);
  Tensor emb = Tensor::zeros(6, 2);
  // Rows 0/1 and 2/3 pair up strongly; everything else stays at the origin.
  emb.at(0, 0) = 3.0;
  emb.at(1, 0) = 3.0;
  emb.at(2, 1) = 3.0;
  emb.at(3, 1) = 3.0;

  std::vector<EvalPair> pairs = {{&g.snapshots[1], emb}};
  MetricsReport r1 = evaluate(pairs, 4, 99);
  MetricsReport r2 = evaluate(pairs, 4, 99);
  CHECK(r1.to_json() == r2.to_json());
  CHECK(r1.mrr == doctest::Approx(1.0));           // planted edges dominate
  CHECK(r1.recall_at_10 == doctest::Approx(1.0));
  CHECK(r1.ranking_cases == 2);
  CHECK(r1.k_neg == 4);
  CHECK(r1.per_snapshot.size() == 1);
  CHECK(r1.per_snapshot[0].positives == 2);
  // Unconnected rows dot to zero, land exactly on the 0.5 threshold and are
  // called positive, so accuracy bottoms out at one half here.
  CHECK(r1.accuracy >= 0.5);
  CHECK(r1.auc == doctest::Approx(1.0));

  MetricsReport r3 = evaluate(pairs, 4, 100);
  CHECK(r3.seed == 100);

  // CSV contains the header plus one row.
  const std::string csv = r1.per_snapshot_csv();
  CHECK(csv.find("snapshot,positives,accuracy,auc,average_precision\n") == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}

TEST_CASE("uniform-rank baseline approaches the harmonic mean estimate") {
  Rng rng(611);
  const int k = 50;
  const double est = uniform_rank_mrr(k, 200000, rng);
  double exact = 0.0;
  for (int r = 1; r <= k + 1; ++r) exact += 1.0 / r;
  exact /= (k + 1);
  CHECK(est == doctest::Approx(exact).epsilon(0.02));
}
