#include "dygssm/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "dygssm/errors.hpp"
#include "dygssm/ssm.hpp"

namespace dygssm {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, end);
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v, bool& out) {
  if (v == "true" || v == "1") return out = true, true;
  if (v == "false" || v == "0") return out = false, true;
  return false;
}

bool parse_ll(const std::string& v, long long& out) {
  try {
    std::size_t used = 0;
    out = std::stoll(v, &used);
    return used == v.size();
  } catch (...) {
    return false;
  }
}

bool parse_u64(const std::string& v, std::uint64_t& out) {
  try {
    std::size_t used = 0;
    out = std::stoull(v, &used);
    return used == v.size();
  } catch (...) {
    return false;
  }
}

bool parse_d(const std::string& v, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(v, &used);
    return used == v.size();
  } catch (...) {
    return false;
  }
}

}  // namespace

RunConfig default_config() {
  RunConfig cfg;
  cfg.synth.noise_rate = 0.002;
  return cfg;
}

void apply_config(RunConfig& cfg, const std::map<std::string, std::string>& kv) {
  std::vector<std::string> bad;
  auto want_int = [&](const std::string& k, const std::string& v, int& field) {
    long long x;
    if (parse_ll(v, x))
      field = static_cast<int>(x);
    else
      bad.push_back(k + ": not an integer: '" + v + "'");
  };
  auto want_bool = [&](const std::string& k, const std::string& v, bool& field) {
    if (!parse_bool(v, field)) bad.push_back(k + ": not a boolean: '" + v + "'");
  };
  auto want_double = [&](const std::string& k, const std::string& v, double& field) {
    if (!parse_d(v, field)) bad.push_back(k + ": not a number: '" + v + "'");
  };

  for (const auto& [k, v] : kv) {
    if (k == "dataset") cfg.dataset = v;
    else if (k == "snapshots") want_int(k, v, cfg.snapshots);
    else if (k == "cumulative") want_bool(k, v, cfg.cumulative);
    else if (k == "synth_nodes") want_int(k, v, cfg.synth.nodes);
    else if (k == "synth_snapshots") want_int(k, v, cfg.synth.snapshots);
    else if (k == "synth_planted") want_int(k, v, cfg.synth.planted_count);
    else if (k == "synth_period") want_int(k, v, cfg.synth.period);
    else if (k == "synth_persistence") want_int(k, v, cfg.synth.persistence);
    else if (k == "synth_base_rate") want_double(k, v, cfg.synth.base_rate);
    else if (k == "synth_noise_rate") want_double(k, v, cfg.synth.noise_rate);
    else if (k == "walk_p") want_double(k, v, cfg.walk.p);
    else if (k == "walk_q") want_double(k, v, cfg.walk.q);
    else if (k == "walks_per_node") want_int(k, v, cfg.walk.walks_per_node);
    else if (k == "walk_length") want_int(k, v, cfg.walk.walk_length);
    else if (k == "top_k") {
      want_int(k, v, cfg.walk.top_k);
      cfg.model.top_k = cfg.walk.top_k;
    } else if (k == "feature_dim") want_int(k, v, cfg.model.feature_dim);
    else if (k == "hidden_dim") want_int(k, v, cfg.model.hidden_dim);
    else if (k == "light_gru") want_bool(k, v, cfg.model.light_gru);
    else if (k == "activation") cfg.model.activation = v;
    else if (k == "feature_mode") cfg.model.feature_mode = v;
    else if (k == "delta_t") want_int(k, v, cfg.trainer.delta_t);
    else if (k == "epochs") want_int(k, v, cfg.trainer.epochs);
    else if (k == "patience") want_int(k, v, cfg.trainer.patience);
    else if (k == "lr") want_double(k, v, cfg.trainer.lr);
    else if (k == "eta") want_double(k, v, cfg.trainer.eta);
    else if (k == "weight_eps") want_double(k, v, cfg.trainer.weight_eps);
    else if (k == "ssm_block") want_int(k, v, cfg.trainer.ssm_block);
    else if (k == "ssm_mode") {
      try {
        cfg.trainer.ssm_mode = parse_ssm_mode(v);
      } catch (const ConfigError& e) {
        bad.push_back(k + ": " + e.what());
      }
    } else if (k == "ssm_persist") want_bool(k, v, cfg.trainer.ssm_state_persist);
    else if (k == "no_ssm") want_bool(k, v, cfg.trainer.no_ssm);
    else if (k == "no_global") want_bool(k, v, cfg.trainer.no_global);
    else if (k == "no_cross_attention") want_bool(k, v, cfg.trainer.no_cross_attention);
    else if (k == "random_window") want_bool(k, v, cfg.trainer.random_window);
    else if (k == "k_neg") want_int(k, v, cfg.trainer.k_neg);
    else if (k == "val_k_neg") want_int(k, v, cfg.trainer.val_k_neg);
    else if (k == "train_fraction") want_double(k, v, cfg.trainer.train_fraction);
    else if (k == "seed") {
      std::uint64_t s;
      if (parse_u64(v, s))
        cfg.trainer.seed = s;
      else
        bad.push_back(k + ": not an unsigned integer: '" + v + "'");
    } else if (k == "eval_k_neg") want_int(k, v, cfg.eval_k_neg);
    else if (k == "out_dir") cfg.out_dir = v;
    else bad.push_back("unknown key '" + k + "'");
  }

  if (!bad.empty()) {
    std::string msg = "invalid config: " + bad[0];
    for (std::size_t i = 1; i < bad.size(); ++i) msg += "; " + bad[i];
    throw ConfigError(msg);
  }
}

void RunConfig::validate_all() {
  if (trainer.no_global) trainer.no_cross_attention = true;

  std::vector<std::string> bad;
  auto collect = [&](auto&& fn) {
    try {
      fn();
    } catch (const ConfigError& e) {
      bad.push_back(e.what());
    }
  };
  if (dataset.empty())
    collect([&] { synth.validate(); });
  else if (snapshots < 2)
    bad.push_back("snapshots must be at least 2 when partitioning a dataset");
  collect([&] { walk.validate(); });
  collect([&] {
    ModelConfig m = model;
    if (m.node_count == 0) m.node_count = 1;  // filled from the data later
    m.validate();
  });
  collect([&] { trainer.validate(); });
  if (eval_k_neg < 1) bad.push_back("eval_k_neg must be >= 1");
  if (out_dir.empty()) bad.push_back("out_dir must not be empty");
  if (model.top_k != walk.top_k)
    bad.push_back("model and walk top_k diverged; set them through the top_k key");

  if (!bad.empty()) {
    std::string msg = bad[0];
    for (std::size_t i = 1; i < bad.size(); ++i) msg += "; " + bad[i];
    throw ConfigError(msg);
  }
}

std::string RunConfig::to_text() const {
  std::ostringstream o;
  o << "# data source\n";
  o << "dataset = " << dataset << "\n";
  o << "snapshots = " << snapshots << "\n";
  o << "cumulative = " << (cumulative ? "true" : "false") << "\n";
  o << "# synthetic source (used when dataset is empty)\n";
  o << "synth_nodes = " << synth.nodes << "\n";
  o << "synth_snapshots = " << synth.snapshots << "\n";
  o << "synth_planted = " << synth.planted_count << "\n";
  o << "synth_period = " << synth.period << "\n";
  o << "synth_persistence = " << synth.persistence << "\n";
  o << "synth_base_rate = " << fmt_double(synth.base_rate) << "\n";
  o << "synth_noise_rate = " << fmt_double(synth.noise_rate) << "\n";
  o << "# biased random walks\n";
  o << "walk_p = " << fmt_double(walk.p) << "\n";
  o << "walk_q = " << fmt_double(walk.q) << "\n";
  o << "walks_per_node = " << walk.walks_per_node << "\n";
  o << "walk_length = " << walk.walk_length << "\n";
  o << "top_k = " << walk.top_k << "\n";
  o << "# model\n";
  o << "feature_dim = " << model.feature_dim << "\n";
  o << "hidden_dim = " << model.hidden_dim << "\n";
  o << "light_gru = " << (model.light_gru ? "true" : "false") << "\n";
  o << "activation = " << model.activation << "\n";
  o << "feature_mode = " << model.feature_mode << "\n";
  o << "# training\n";
  o << "delta_t = " << trainer.delta_t << "\n";
  o << "epochs = " << trainer.epochs << "\n";
  o << "patience = " << trainer.patience << "\n";
  o << "lr = " << fmt_double(trainer.lr) << "\n";
  o << "eta = " << fmt_double(trainer.eta) << "\n";
  o << "weight_eps = " << fmt_double(trainer.weight_eps) << "\n";
  o << "ssm_block = " << trainer.ssm_block << "\n";
  o << "ssm_mode = " << to_string(trainer.ssm_mode) << "\n";
  o << "ssm_persist = " << (trainer.ssm_state_persist ? "true" : "false") << "\n";
  o << "no_ssm = " << (trainer.no_ssm ? "true" : "false") << "\n";
  o << "no_global = " << (trainer.no_global ? "true" : "false") << "\n";
  o << "no_cross_attention = " << (trainer.no_cross_attention ? "true" : "false") << "\n";
  o << "random_window = " << (trainer.random_window ? "true" : "false") << "\n";
  o << "k_neg = " << trainer.k_neg << "\n";
  o << "val_k_neg = " << trainer.val_k_neg << "\n";
  o << "train_fraction = " << fmt_double(trainer.train_fraction) << "\n";
  o << "seed = " << trainer.seed << "\n";
  o << "# evaluation and output\n";
  o << "eval_k_neg = " << eval_k_neg << "\n";
  o << "out_dir = " << out_dir << "\n";
  return o.str();
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::vector<std::string> bad;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      bad.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      bad.push_back("line " + std::to_string(lineno) + ": empty key");
      continue;
    }
    if (!kv.emplace(key, value).second)
      bad.push_back("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  if (!bad.empty()) {
    std::string msg = "malformed config: " + bad[0];
    for (std::size_t i = 1; i < bad.size(); ++i) msg += "; " + bad[i];
    throw ConfigError(msg);
  }
  return kv;
}

std::map<std::string, std::string> load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace dygssm
