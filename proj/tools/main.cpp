// Command-line pipeline: prepare artifacts, train, evaluate, and generate
// synthetic datasets. Exit codes: 0 ok, 2 config error, 3 data error,
// 4 numeric failure.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dygssm/config.hpp"
#include "dygssm/errors.hpp"
#include "dygssm/io.hpp"
#include "dygssm/synthetic.hpp"
#include "dygssm/trainer.hpp"

namespace fs = std::filesystem;
using namespace dygssm;

namespace {

std::string thousands(long long n) {
  std::string raw = std::to_string(n);
  std::string out;
  int digits = 0;
  for (auto it = raw.rbegin(); it != raw.rend(); ++it) {
    if (digits > 0 && digits % 3 == 0 && *it != '-') out.push_back(',');
    out.push_back(*it);
    ++digits;
  }
  return std::string(out.rbegin(), out.rend());
}

// Builds the effective config: defaults, then the file, then --set pairs
// and convenience flags (later entries win within the overrides).
RunConfig resolve_config(const std::string& config_path,
                         const std::vector<std::string>& sets,
                         const std::map<std::string, std::string>& extra) {
  RunConfig cfg = default_config();
  if (!config_path.empty()) apply_config(cfg, load_config_file(config_path));

  std::map<std::string, std::string> overrides;
  std::vector<std::string> bad;
  for (const auto& s : sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      bad.push_back("--set '" + s + "': expected key=value");
      continue;
    }
    overrides[s.substr(0, eq)] = s.substr(eq + 1);
  }
  if (!bad.empty()) {
    std::string msg;
    for (const auto& b : bad) msg += (msg.empty() ? "" : "\n") + b;
    throw ConfigError(msg);
  }
  for (const auto& [k, v] : extra) overrides[k] = v;
  if (!overrides.empty()) apply_config(cfg, overrides);
  cfg.validate_all();
  return cfg;
}

std::string cache_path(const RunConfig& cfg) { return cfg.out_dir + "/walk_cache.csv"; }

DynamicGraph load_prepared_graph(const RunConfig& cfg) {
  if (!fs::exists(fs::path(cfg.out_dir) / "graph_meta.txt"))
    throw DataError("no prepared snapshots under '" + cfg.out_dir + "' (run prepare first)");
  return load_snapshots(cfg.out_dir);
}

WalkCache load_prepared_cache(const RunConfig& cfg) {
  if (!fs::exists(cache_path(cfg)))
    throw DataError("missing walk cache '" + cache_path(cfg) + "' (run prepare first)");
  return load_cache(cache_path(cfg));
}

long long total_edges(const DynamicGraph& g) {
  long long n = 0;
  for (const auto& s : g.snapshots) n += static_cast<long long>(s.edges.size());
  return n;
}

void cmd_prepare(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  DynamicGraph graph;
  long long edge_rows = 0;
  if (cfg.dataset.empty()) {
    SyntheticData data = generate_synthetic(cfg.synth, cfg.trainer.seed);
    graph = std::move(data.graph);
    edge_rows = total_edges(graph);
    std::string planted = "u,v\n";
    for (auto [u, v] : data.planted)
      planted += std::to_string(u) + "," + std::to_string(v) + "\n";
    write_text_file(cfg.out_dir + "/planted.csv", planted);
  } else {
    EdgeData data = load_edge_csv(cfg.dataset);
    edge_rows = static_cast<long long>(data.edges.size());
    graph = partition_snapshots(data.edges, cfg.snapshots, cfg.cumulative);
    save_node_mapping(data.original_ids, cfg.out_dir + "/node_mapping.csv");
  }
  save_snapshots(graph, cfg.out_dir);
  WalkCache cache = build_cache(graph, cfg.walk, cfg.trainer.seed);
  save_cache(cache, cache_path(cfg));
  write_text_file(cfg.out_dir + "/resolved_config.txt", cfg.to_text());
  std::printf("%s nodes, %s edges, %s snapshots\n", thousands(graph.node_count).c_str(),
              thousands(edge_rows).c_str(), thousands(graph.snapshot_count()).c_str());
  std::printf("artifacts written to %s\n", cfg.out_dir.c_str());
}

void cmd_train(const RunConfig& cfg) {
  DynamicGraph graph = load_prepared_graph(cfg);
  WalkCache cache = load_prepared_cache(cfg);
  if (cache.top_k != cfg.model.top_k)
    throw ConfigError("walk cache was built with top_k=" + std::to_string(cache.top_k) +
                      " but the config asks for " + std::to_string(cfg.model.top_k));
  ModelConfig mcfg = cfg.model;
  mcfg.node_count = graph.node_count;

  Trainer trainer(std::move(graph), std::move(cache), mcfg, cfg.trainer);
  TrainResult result = trainer.train();

  fs::create_directories(cfg.out_dir);
  save_checkpoint(result.params, cfg.out_dir + "/checkpoint.txt");
  write_text_file(cfg.out_dir + "/history.csv", history_csv(result.history));
  write_text_file(cfg.out_dir + "/resolved_config.txt", cfg.to_text());
  std::printf("trained %d epoch(s) on %d snapshot(s); best val MRR %.6f at epoch %d\n",
              result.epochs_run, result.train_snapshots, result.best_val_mrr,
              result.best_epoch);
  std::printf("wrote %s/checkpoint.txt, history.csv, resolved_config.txt\n",
              cfg.out_dir.c_str());
}

void cmd_evaluate(const RunConfig& cfg, const std::string& checkpoint_override) {
  DynamicGraph graph = load_prepared_graph(cfg);
  WalkCache cache = load_prepared_cache(cfg);
  ModelConfig mcfg = cfg.model;
  mcfg.node_count = graph.node_count;

  const std::string ckpt = checkpoint_override.empty()
                               ? cfg.out_dir + "/checkpoint.txt"
                               : checkpoint_override;
  if (!fs::exists(ckpt)) throw DataError("checkpoint '" + ckpt + "' not found");
  ModelParams params = load_checkpoint(ckpt);

  // The checkpoint must describe exactly the tensors this config would
  // create, shape for shape.
  ModelParams expected = init_params(mcfg, 1);
  std::string mismatch;
  for (const auto& name : expected.names()) {
    if (!params.has(name)) {
      mismatch += "missing tensor '" + name + "'; ";
      continue;
    }
    const Tensor &a = expected.get(name), &b = params.get(name);
    if (a.rows() != b.rows() || a.cols() != b.cols())
      mismatch += "'" + name + "' is " + std::to_string(b.rows()) + "x" +
                  std::to_string(b.cols()) + ", config expects " +
                  std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + "; ";
  }
  for (const auto& name : params.names())
    if (!expected.has(name)) mismatch += "unexpected tensor '" + name + "'; ";
  if (!mismatch.empty())
    throw ConfigError("checkpoint incompatible with config: " + mismatch);

  Trainer trainer(std::move(graph), std::move(cache), mcfg, cfg.trainer);
  MetricsReport report =
      trainer.evaluate_test(params, cfg.eval_k_neg, cfg.trainer.seed);

  fs::create_directories(cfg.out_dir);
  const std::string tag = "_k" + std::to_string(cfg.eval_k_neg);
  write_text_file(cfg.out_dir + "/metrics" + tag + ".json", report.to_json());
  write_text_file(cfg.out_dir + "/per_snapshot" + tag + ".csv",
                  report.per_snapshot_csv());
  std::printf(
      "accuracy %.4f  auc %.4f  ap %.4f  mrr %.4f  recall@10 %.4f  "
      "(%d ranking cases, k_neg=%d)\n",
      report.accuracy, report.auc, report.average_precision, report.mrr,
      report.recall_at_10, report.ranking_cases, report.k_neg);
  std::printf("wrote %s/metrics%s.json and per_snapshot%s.csv\n", cfg.out_dir.c_str(),
              tag.c_str(), tag.c_str());
}

// Emits the synthetic graph as a timestamped edge CSV (timestamp = snapshot
// index, which `prepare` bins back into the same snapshots) plus the planted
// ground truth.
void cmd_synth(const RunConfig& cfg) {
  SyntheticData data = generate_synthetic(cfg.synth, cfg.trainer.seed);
  fs::create_directories(cfg.out_dir);

  std::string csv = "source,target,timestamp\n";
  for (int t = 0; t < data.graph.snapshot_count(); ++t)
    for (auto [u, v] : data.graph.snapshots[t].edges)
      csv += std::to_string(u) + "," + std::to_string(v) + "," + std::to_string(t) + "\n";
  write_text_file(cfg.out_dir + "/synthetic_edges.csv", csv);

  std::string planted = "u,v\n";
  for (auto [u, v] : data.planted)
    planted += std::to_string(u) + "," + std::to_string(v) + "\n";
  write_text_file(cfg.out_dir + "/planted.csv", planted);

  std::printf("%s nodes, %s edges, %s snapshots\n",
              thousands(cfg.synth.nodes).c_str(),
              thousands(total_edges(data.graph)).c_str(),
              thousands(data.graph.snapshot_count()).c_str());
  std::printf("wrote %s/synthetic_edges.csv and planted.csv\n", cfg.out_dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic-graph link prediction pipeline"};
  app.require_subcommand(1);

  std::string config_path, out_dir, checkpoint;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  int k_neg = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value config file");
    sub->add_option("--set", sets, "override a config key (key=value), repeatable");
    sub->add_option("--out", out_dir, "output directory (overrides out_dir)");
  };

  CLI::App* prepare =
      app.add_subcommand("prepare", "build snapshot files and the walk cache");
  add_common(prepare);
  prepare->add_option("--seed", seed, "seed for synthetic generation and walks");

  CLI::App* train = app.add_subcommand("train", "run meta-training over windows");
  add_common(train);
  train->add_option("--seed", seed, "run seed")->required();

  CLI::App* evaluate = app.add_subcommand("evaluate", "score a checkpoint on the test split");
  add_common(evaluate);
  evaluate->add_option("--seed", seed, "negative-sampling seed")->required();
  evaluate->add_option("--checkpoint", checkpoint, "checkpoint path (default <out>/checkpoint.txt)");
  evaluate->add_option("--k-neg", k_neg, "negatives per ranking case (overrides eval_k_neg)");

  CLI::App* synth = app.add_subcommand("synth", "write a synthetic dataset as an edge CSV");
  add_common(synth);
  synth->add_option("--seed", seed, "generation seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return 2;
  }

  try {
    std::map<std::string, std::string> extra;
    if (prepare->count("--seed") || train->count("--seed") ||
        evaluate->count("--seed") || synth->count("--seed"))
      extra["seed"] = std::to_string(seed);
    if (!out_dir.empty()) extra["out_dir"] = out_dir;
    if (evaluate->count("--k-neg")) extra["eval_k_neg"] = std::to_string(k_neg);

    RunConfig cfg = resolve_config(config_path, sets, extra);
    if (prepare->parsed()) cmd_prepare(cfg);
    if (train->parsed()) cmd_train(cfg);
    if (evaluate->parsed()) cmd_evaluate(cfg, checkpoint);
    if (synth->parsed()) cmd_synth(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
