#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dygssm/graph.hpp"
#include "dygssm/rng.hpp"
#include "dygssm/tensor.hpp"

namespace dygssm {

// One ranked prediction: a true edge's score against k sampled non-edges.
struct RankingCase {
  double positive = 0.0;
  std::vector<double> negatives;
};

// 1-based rank of the positive among its negatives, ties mid-ranked:
//   rank = 1 + |strictly greater| + floor(|tied| / 2).
int rank_positive(const RankingCase& c);

double mrr(const std::vector<RankingCase>& cases);
double recall_at_k(const std::vector<RankingCase>& cases, int k = 10);

// Threshold/classification metrics over a flat score/label set. auc uses
// the rank-sum formulation with mid-rank ties; average_precision walks the
// descending-score order (ties kept in input order). Both throw when only
// one class is present.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);
double average_precision(const std::vector<double>& scores, const std::vector<int>& labels);
double accuracy(const std::vector<double>& scores, const std::vector<int>& labels,
                double threshold = 0.5);

struct SnapshotMetrics {
  int snapshot = 0;  // index of the scored snapshot (t+1)
  int positives = 0;
  double accuracy = 0.0;
  double auc = 0.0;
  double average_precision = 0.0;
};

struct MetricsReport {
  double accuracy = 0.0;
  double auc = 0.0;
  double average_precision = 0.0;
  double mrr = 0.0;
  double recall_at_10 = 0.0;
  std::uint64_t seed = 0;
  int k_neg = 0;
  int ranking_cases = 0;
  std::vector<SnapshotMetrics> per_snapshot;

  // Fixed key order; byte-stable for fixed inputs.
  std::string to_json() const;
  std::string per_snapshot_csv() const;
};

// Embeddings computed at time t, scored against the edges of snapshot t+1.
struct EvalPair {
  const Snapshot* target = nullptr;  // snapshot t+1
  Tensor embeddings;                 // node embeddings from time t
};

// Re-sampling protocol: per unique positive edge (u, v), u < v, of each
// target snapshot, rank the edge's score against k_neg negatives sampled
// from u's non-neighbors; MRR / Recall@10 pool every case. Classification
// metrics use a balanced set (each positive plus one sampled negative) and
// are macro-averaged over snapshots. Snapshots without positives are
// skipped with a warning on stderr. Deterministic per seed.
MetricsReport evaluate(const std::vector<EvalPair>& pairs, int k_neg, std::uint64_t seed);

// Monte-Carlo estimate of MRR when ranks are uniform on 1..k_neg+1 — the
// chance floor a trained model must clear.
double uniform_rank_mrr(int k_neg, int samples, Rng& rng);

}  // namespace dygssm
