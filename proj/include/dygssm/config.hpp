#pragma once

#include <map>
#include <string>

#include "dygssm/model.hpp"
#include "dygssm/synthetic.hpp"
#include "dygssm/trainer.hpp"
#include "dygssm/walk.hpp"

namespace dygssm {

// Every run option in one place. The on-disk form is a flat key=value file
// ('#' lines are comments); resolve() materializes every default so a saved
// resolved config reproduces the run byte-for-byte.
struct RunConfig {
  std::string dataset;  // edge CSV path; empty selects the synthetic source
  int snapshots = 20;   // time bins when partitioning a dataset
  bool cumulative = false;

  SyntheticSpec synth;  // synth_* keys; planted_count 40, noise 0.002
  WalkConfig walk;
  ModelConfig model;    // node_count comes from the data, not the file
  TrainConfig trainer;
  int eval_k_neg = 1000;
  std::string out_dir = "run";

  // Checks everything at once (ConfigError lists all problems) and applies
  // forced combinations: no_global disables cross-attention.
  void validate_all();

  // Canonical serialization: every key, fixed order.
  std::string to_text() const;
};

RunConfig default_config();

// Flat key=value lines -> map. DataError on unreadable file; ConfigError on
// malformed lines or duplicate keys (line numbers included).
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> load_config_file(const std::string& path);

// Applies `kv` on top of `cfg`. Unknown keys and unparseable values are
// collected and thrown as one ConfigError.
void apply_config(RunConfig& cfg, const std::map<std::string, std::string>& kv);

}  // namespace dygssm
