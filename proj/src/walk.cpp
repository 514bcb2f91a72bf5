#include "dygssm/walk.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "dygssm/errors.hpp"

namespace dygssm {

void WalkConfig::validate() const {
  if (p <= 0.0 || q <= 0.0) throw ConfigError("walk parameters p and q must be positive");
  if (walks_per_node < 1 || walk_length < 1 || top_k < 1)
    throw ConfigError("walk counts and lengths must be at least 1");
}

std::vector<int> biased_walk(const Snapshot& snapshot, int source, const WalkConfig& cfg,
                             Rng& rng) {
  std::vector<int> path{source};
  if (snapshot.degree(source) == 0) return path;
  path.reserve(cfg.walk_length + 1);

  // First step: uniform over neighbors.
  {
    const auto& nb = snapshot.neighbors[source];
    path.push_back(nb[rng.next_below(static_cast<std::int64_t>(nb.size()))]);
  }

  std::vector<double> weights;
  for (int step = 1; step < cfg.walk_length; ++step) {
    const int cur = path.back();
    const int prev = path[path.size() - 2];
    const auto& nb = snapshot.neighbors[cur];
    weights.clear();
    double total = 0.0;
    for (int v : nb) {
      double w;
      if (v == prev)
        w = 1.0 / cfg.p;
      else if (snapshot.has_edge(v, prev))
        w = 1.0;
      else
        w = 1.0 / cfg.q;
      weights.push_back(w);
      total += w;
    }
    double r = rng.next_double() * total;
    std::size_t pick = 0;
    while (pick + 1 < weights.size() && r >= weights[pick]) {
      r -= weights[pick];
      ++pick;
    }
    path.push_back(nb[pick]);
  }
  return path;
}

std::vector<int> walk_summary(const Snapshot& snapshot, int source, const WalkConfig& cfg,
                              Rng& rng) {
  cfg.validate();
  std::map<int, int> counts;
  for (int w = 0; w < cfg.walks_per_node; ++w) {
    const auto path = biased_walk(snapshot, source, cfg, rng);
    for (std::size_t i = 1; i < path.size(); ++i)
      if (path[i] != source) ++counts[path[i]];
  }
  std::vector<std::pair<int, int>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<int> out;
  for (std::size_t i = 0; i < ranked.size() && i < static_cast<std::size_t>(cfg.top_k); ++i)
    out.push_back(ranked[i].first);
  return out;
}

WalkCache build_cache(const DynamicGraph& graph, const WalkConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng root(seed);
  WalkCache cache;
  cache.top_k = cfg.top_k;
  cache.summaries.resize(graph.snapshot_count());
  for (int t = 0; t < graph.snapshot_count(); ++t) {
    cache.summaries[t].resize(graph.node_count);
    for (int u = 0; u < graph.node_count; ++u) {
      Rng stream = root.derive(0x77a1, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(u));
      cache.summaries[t][u] = walk_summary(graph.snapshots[t], u, cfg, stream);
    }
  }
  return cache;
}

void save_cache(const WalkCache& cache, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open walk cache for writing: " + path);
  out << "snapshot,source";
  for (int i = 1; i <= cache.top_k; ++i) out << ",n" << i;
  out << "\n";
  for (int t = 0; t < cache.snapshot_count(); ++t) {
    for (std::size_t u = 0; u < cache.summaries[t].size(); ++u) {
      out << t << ',' << u;
      for (int v : cache.summaries[t][u]) out << ',' << v;
      out << "\n";
    }
  }
  if (!out) throw DataError("failed writing walk cache: " + path);
}

WalkCache load_cache(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open walk cache: " + path);
  WalkCache cache;
  std::string line;
  bool first = true;
  int max_node = -1;
  std::vector<std::tuple<int, int, std::vector<int>>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("snapshot,", 0) == 0) {
        cache.top_k = static_cast<int>(std::count(line.begin(), line.end(), ',')) - 1;
        continue;
      }
    }
    std::stringstream ss(line);
    std::string field;
    std::vector<int> fields;
    while (std::getline(ss, field, ',')) {
      try {
        fields.push_back(std::stoi(field));
      } catch (const std::exception&) {
        throw DataError("bad walk cache row in " + path + ": " + line);
      }
    }
    if (fields.size() < 2) throw DataError("bad walk cache row in " + path + ": " + line);
    const int t = fields[0];
    const int u = fields[1];
    if (t < 0 || u < 0) throw DataError("bad walk cache ids in " + path + ": " + line);
    max_node = std::max(max_node, u);
    rows.emplace_back(t, u, std::vector<int>(fields.begin() + 2, fields.end()));
    cache.top_k = std::max(cache.top_k,
                           static_cast<int>(fields.size()) - 2);
  }
  int max_t = -1;
  for (const auto& [t, u, summary] : rows) max_t = std::max(max_t, t);
  cache.summaries.assign(max_t + 1, std::vector<std::vector<int>>(max_node + 1));
  for (auto& [t, u, summary] : rows) cache.summaries[t][u] = std::move(summary);
  return cache;
}

}  // namespace dygssm
