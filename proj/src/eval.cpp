#include "dygssm/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iostream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "dygssm/errors.hpp"
#include "dygssm/model.hpp"

namespace dygssm {

int rank_positive(const RankingCase& c) {
  if (c.negatives.empty()) throw ContractError("ranking case without negatives");
  int greater = 0, tied = 0;
  for (double s : c.negatives) {
    if (s > c.positive)
      ++greater;
    else if (s == c.positive)
      ++tied;
  }
  return 1 + greater + tied / 2;
}

double mrr(const std::vector<RankingCase>& cases) {
  if (cases.empty()) throw ContractError("no ranking cases");
  double total = 0.0;
  for (const auto& c : cases) total += 1.0 / rank_positive(c);
  return total / static_cast<double>(cases.size());
}

double recall_at_k(const std::vector<RankingCase>& cases, int k) {
  if (cases.empty()) throw ContractError("no ranking cases");
  int hits = 0;
  for (const auto& c : cases)
    if (rank_positive(c) <= k) ++hits;
  return static_cast<double>(hits) / static_cast<double>(cases.size());
}

namespace {

void check_two_classes(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw ContractError("scores and labels must be non-empty and aligned");
  const int first = labels.front();
  if (std::all_of(labels.begin(), labels.end(), [first](int l) { return l == first; }))
    throw DataError("metric undefined: only one class present");
}

}  // namespace

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  check_two_classes(scores, labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Mid-rank assignment over tied groups.
  std::vector<double> rank(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) rank[order[t]] = mid;
    i = j + 1;
  }
  double pos_rank_sum = 0.0;
  std::size_t pos = 0;
  for (std::size_t t = 0; t < n; ++t) {
    if (labels[t] == 1) {
      pos_rank_sum += rank[t];
      ++pos;
    }
  }
  const std::size_t neg = n - pos;
  return (pos_rank_sum - static_cast<double>(pos) * (pos + 1) / 2.0) /
         (static_cast<double>(pos) * static_cast<double>(neg));
}

double average_precision(const std::vector<double>& scores, const std::vector<int>& labels) {
  check_two_classes(scores, labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double hits = 0.0, total = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    if (labels[order[t]] == 1) {
      hits += 1.0;
      total += hits / static_cast<double>(t + 1);
    }
  }
  return total / hits;
}

double accuracy(const std::vector<double>& scores, const std::vector<int>& labels,
                double threshold) {
  if (scores.size() != labels.size() || scores.empty())
    throw ContractError("scores and labels must be non-empty and aligned");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if ((scores[i] >= threshold ? 1 : 0) == labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(scores.size());
}

namespace {

std::string fmt(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, end);
}

}  // namespace

std::string MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  j["accuracy"] = accuracy;
  j["auc"] = auc;
  j["average_precision"] = average_precision;
  j["mrr"] = mrr;
  j["recall_at_10"] = recall_at_10;
  j["seed"] = seed;
  j["k_neg"] = k_neg;
  j["ranking_cases"] = ranking_cases;
  j["snapshots_evaluated"] = per_snapshot.size();
  return j.dump(2) + "\n";
}

std::string MetricsReport::per_snapshot_csv() const {
  std::ostringstream out;
  out << "snapshot,positives,accuracy,auc,average_precision\n";
  for (const auto& s : per_snapshot)
    out << s.snapshot << ',' << s.positives << ',' << fmt(s.accuracy) << ',' << fmt(s.auc) << ','
        << fmt(s.average_precision) << "\n";
  return out.str();
}

MetricsReport evaluate(const std::vector<EvalPair>& pairs, int k_neg, std::uint64_t seed) {
  if (pairs.empty()) throw ContractError("nothing to evaluate");
  if (k_neg < 1) throw ConfigError("negative sample count must be positive");
  Rng root(seed);
  MetricsReport report;
  report.seed = seed;
  report.k_neg = k_neg;

  std::vector<RankingCase> cases;
  double acc_sum = 0.0, auc_sum = 0.0, ap_sum = 0.0;
  for (const auto& pair : pairs) {
    const Snapshot& snap = *pair.target;
    // Unique undirected positives, canonical u < v, sorted for determinism.
    std::vector<std::pair<int, int>> positives;
    for (int u = 0; u < snap.node_count; ++u)
      for (int v : snap.neighbors[u])
        if (u < v) positives.emplace_back(u, v);
    if (positives.empty()) {
      std::cerr << "warning: snapshot " << snap.index << " has no positive edges; skipped\n";
      continue;
    }

    std::vector<double> cls_scores;
    std::vector<int> cls_labels;
    int last_source = -1;
    Rng rank_stream(0), cls_stream(0);
    for (const auto& [u, v] : positives) {
      if (u != last_source) {
        rank_stream = root.derive(0xea01, static_cast<std::uint64_t>(snap.index),
                                  static_cast<std::uint64_t>(u));
        cls_stream = root.derive(0xea02, static_cast<std::uint64_t>(snap.index),
                                 static_cast<std::uint64_t>(u));
        last_source = u;
      }
      std::vector<int> negs, cls_neg;
      try {
        negs = negative_sample(snap, u, k_neg, rank_stream);
        cls_neg = negative_sample(snap, u, 1, cls_stream);
      } catch (const DataError&) {
        std::cerr << "warning: no negatives available for node " << u << " in snapshot "
                  << snap.index << "; case skipped\n";
        continue;
      }
      RankingCase rc;
      rc.positive = score_edge(pair.embeddings, u, v);
      rc.negatives.reserve(negs.size());
      for (int w : negs) rc.negatives.push_back(score_edge(pair.embeddings, u, w));
      cases.push_back(std::move(rc));

      cls_scores.push_back(score_edge(pair.embeddings, u, v));
      cls_labels.push_back(1);
      cls_scores.push_back(score_edge(pair.embeddings, u, cls_neg[0]));
      cls_labels.push_back(0);
    }
    if (cls_scores.empty()) continue;

    SnapshotMetrics sm;
    sm.snapshot = snap.index;
    sm.positives = static_cast<int>(cls_scores.size()) / 2;
    sm.accuracy = accuracy(cls_scores, cls_labels);
    sm.auc = auc(cls_scores, cls_labels);
    sm.average_precision = average_precision(cls_scores, cls_labels);
    acc_sum += sm.accuracy;
    auc_sum += sm.auc;
    ap_sum += sm.average_precision;
    report.per_snapshot.push_back(sm);
  }

  if (cases.empty()) throw DataError("no ranking cases across the evaluation split");
  report.ranking_cases = static_cast<int>(cases.size());
  report.mrr = mrr(cases);
  report.recall_at_10 = recall_at_k(cases, 10);
  const double n_snap = static_cast<double>(report.per_snapshot.size());
  report.accuracy = acc_sum / n_snap;
  report.auc = auc_sum / n_snap;
  report.average_precision = ap_sum / n_snap;
  return report;
}

double uniform_rank_mrr(int k_neg, int samples, Rng& rng) {
  if (k_neg < 1 || samples < 1) throw ContractError("baseline needs positive sizes");
  double total = 0.0;
  for (int i = 0; i < samples; ++i)
    total += 1.0 / static_cast<double>(1 + rng.next_below(k_neg + 1));
  return total / samples;
}

}  // namespace dygssm
