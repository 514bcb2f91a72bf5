#include "dygssm/model.hpp"

#include <algorithm>
#include <cmath>

#include "dygssm/errors.hpp"

namespace dygssm {

std::string to_string(ParamGroup g) {
  switch (g) {
    case ParamGroup::gcn: return "gcn";
    case ParamGroup::gru: return "gru";
    case ParamGroup::attn: return "attn";
  }
  return "?";
}

void ModelConfig::validate() const {
  if (node_count < 1) throw ConfigError("model requires a positive node count");
  if (feature_dim < 1 || hidden_dim < 1) throw ConfigError("dimensions must be positive");
  if (top_k < 1) throw ConfigError("top_k must be positive");
  if (activation != "relu" && activation != "tanh")
    throw ConfigError("unknown activation: " + activation);
  if (feature_mode != "table" && feature_mode != "one_hot" && feature_mode != "degree")
    throw ConfigError("unknown feature mode: " + feature_mode);
}

int ModelConfig::effective_feature_dim() const {
  if (feature_mode == "one_hot") return node_count;
  if (feature_mode == "degree") return 1;
  return feature_dim;
}

void ModelParams::add(const std::string& name, ParamGroup group, Tensor t) {
  if (has(name)) throw ContractError("duplicate parameter name: " + name);
  names_.push_back(name);
  tensors_.emplace(name, std::move(t));
  groups_.emplace(name, group);
}

const Tensor& ModelParams::get(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw ContractError("unknown parameter: " + name);
  return it->second;
}

void ModelParams::set(const std::string& name, Tensor t) {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw ContractError("unknown parameter: " + name);
  it->second = std::move(t);
}

ParamGroup ModelParams::group_of(const std::string& name) const {
  auto it = groups_.find(name);
  if (it == groups_.end()) throw ContractError("unknown parameter: " + name);
  return it->second;
}

std::vector<std::pair<std::string, Tensor>> ModelParams::all() const {
  std::vector<std::pair<std::string, Tensor>> out;
  out.reserve(names_.size());
  for (const auto& n : names_) out.emplace_back(n, tensors_.at(n));
  return out;
}

std::vector<std::pair<std::string, Tensor>> ModelParams::in_group(ParamGroup group) const {
  std::vector<std::pair<std::string, Tensor>> out;
  for (const auto& n : names_)
    if (groups_.at(n) == group) out.emplace_back(n, tensors_.at(n));
  return out;
}

std::int64_t ModelParams::count(ParamGroup group) const {
  std::int64_t total = 0;
  for (const auto& [name, t] : in_group(group)) total += t.size();
  return total;
}

std::int64_t ModelParams::count_total() const {
  std::int64_t total = 0;
  for (const auto& n : names_) total += tensors_.at(n).size();
  return total;
}

void ModelParams::zero_grad() {
  for (const auto& n : names_) tensors_.at(n).zero_grad();
}

ModelParams ModelParams::clone() const {
  ModelParams out;
  for (const auto& n : names_) out.add(n, groups_.at(n), tensors_.at(n).clone());
  return out;
}

namespace {

Tensor glorot(int rows, int cols, Rng rng) {
  const double limit = std::sqrt(6.0 / (rows + cols));
  Tensor t = Tensor::zeros(rows, cols, /*requires_grad=*/true);
  for (auto& v : t.data()) v = rng.uniform(-limit, limit);
  return t;
}

std::uint64_t name_tag(const std::string& name) {
  // FNV-1a; stable across platforms so per-name init streams are stable.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : name) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const int m = cfg.effective_feature_dim();
  const int d = cfg.hidden_dim;
  Rng root(seed);
  ModelParams p;
  auto weight = [&](const std::string& name, ParamGroup g, int rows, int cols) {
    p.add(name, g, glorot(rows, cols, root.derive(0x1417, name_tag(name))));
  };
  auto bias = [&](const std::string& name, ParamGroup g, int cols) {
    p.add(name, g, Tensor::zeros(1, cols, /*requires_grad=*/true));
  };

  if (cfg.feature_mode == "table") weight("features", ParamGroup::gcn, cfg.node_count, m);

  const int in1 = m, in2 = d;
  weight("gcn.l1.W", ParamGroup::gcn, in1, d);
  weight("gcn.l1.O", ParamGroup::gcn, d, d);
  bias("gcn.l1.bO", ParamGroup::gcn, d);
  weight("gcn.l1.J", ParamGroup::gcn, in1, d);
  bias("gcn.l1.bJ", ParamGroup::gcn, d);
  weight("gcn.l2.W", ParamGroup::gcn, in2, d);
  weight("gcn.l2.O", ParamGroup::gcn, d, d);
  bias("gcn.l2.bO", ParamGroup::gcn, d);
  weight("gcn.l2.J", ParamGroup::gcn, in2, d);
  bias("gcn.l2.bJ", ParamGroup::gcn, d);

  for (int layer = 1; layer <= 2; ++layer) {
    const std::string pre = "gru.l" + std::to_string(layer) + ".";
    const int din = layer == 1 ? m : d;
    if (cfg.light_gru) {
      weight(pre + "Wz", ParamGroup::gru, din, d);
      bias(pre + "bz", ParamGroup::gru, d);
      weight(pre + "Wh", ParamGroup::gru, din, d);
      bias(pre + "bh", ParamGroup::gru, d);
    } else {
      // Gate inputs are the concatenation [h_prev, x].
      weight(pre + "Wz", ParamGroup::gru, d + din, d);
      bias(pre + "bz", ParamGroup::gru, d);
      weight(pre + "Wr", ParamGroup::gru, d + din, d);
      bias(pre + "br", ParamGroup::gru, d);
      weight(pre + "Wh", ParamGroup::gru, d + din, d);
      bias(pre + "bh", ParamGroup::gru, d);
    }
  }

  weight("attn.Wq", ParamGroup::attn, d, d);
  weight("attn.Wk", ParamGroup::attn, d, d);
  weight("attn.Wv", ParamGroup::attn, d, d);
  return p;
}

std::int64_t full_gru_param_count(int d_in, int d_h) {
  auto layer = [d_h](int din) {
    return 3ll * (d_h + din) * d_h + 3ll * d_h;
  };
  return layer(d_in) + layer(d_h);
}

std::int64_t light_gru_param_count(int d_in, int d_h) {
  auto layer = [d_h](int din) { return 2ll * din * d_h + 2ll * d_h; };
  return layer(d_in) + layer(d_h);
}

Tensor features_for(const Snapshot& snapshot, const ModelParams& params, const ModelConfig& cfg) {
  if (cfg.feature_mode == "table") return params.get("features");
  if (cfg.feature_mode == "one_hot") {
    Tensor x = Tensor::zeros(cfg.node_count, cfg.node_count);
    for (int i = 0; i < cfg.node_count; ++i) x.at(i, i) = 1.0;
    return x;
  }
  Tensor x = Tensor::zeros(cfg.node_count, 1);
  for (int u = 0; u < cfg.node_count; ++u) x.at(u, 0) = snapshot.degree(u);
  return x;
}

namespace {

Tensor activate(Tape& tape, const Tensor& t, const ModelConfig& cfg) {
  return cfg.activation == "tanh" ? tape.tanh(t) : tape.relu(t);
}

Tensor gcn_layer(Tape& tape, const CsrMatrix& norm_adj, const Tensor& h_prev,
                 const ModelParams& p, const ModelConfig& cfg, int layer) {
  const std::string pre = "gcn.l" + std::to_string(layer) + ".";
  Tensor h = activate(tape, tape.matmul(tape.spmm(norm_adj, h_prev), p.get(pre + "W")), cfg);
  Tensor transformed = tape.add(tape.matmul(h, p.get(pre + "O")), p.get(pre + "bO"));
  Tensor skip = tape.add(tape.matmul(h_prev, p.get(pre + "J")), p.get(pre + "bJ"));
  return tape.add(transformed, skip);
}

}  // namespace

Tensor gcn_forward(Tape& tape, const CsrMatrix& norm_adj, const Tensor& features,
                   const ModelParams& params, const ModelConfig& cfg) {
  if (features.rows() != norm_adj.rows)
    throw ShapeError("feature rows " + features.shape_str() + " do not match adjacency " +
                     std::to_string(norm_adj.rows));
  Tensor h1 = gcn_layer(tape, norm_adj, features, params, cfg, 1);
  return gcn_layer(tape, norm_adj, h1, params, cfg, 2);
}

namespace {

std::vector<Tensor> gru_layer(Tape& tape, const std::vector<Tensor>& steps, const ModelParams& p,
                              const ModelConfig& cfg, int layer) {
  const std::string pre = "gru.l" + std::to_string(layer) + ".";
  const int n = steps.front().rows();
  const int d = cfg.hidden_dim;
  Tensor ones = Tensor::full(n, d, 1.0);
  Tensor h = Tensor::zeros(n, d);
  std::vector<Tensor> hidden;
  hidden.reserve(steps.size());
  for (const Tensor& x : steps) {
    Tensor z, hh;
    if (cfg.light_gru) {
      z = tape.sigmoid(tape.add(tape.matmul(x, p.get(pre + "Wz")), p.get(pre + "bz")));
      hh = tape.add(tape.matmul(x, p.get(pre + "Wh")), p.get(pre + "bh"));
    } else {
      Tensor cat = tape.concat_cols(h, x);
      z = tape.sigmoid(tape.add(tape.matmul(cat, p.get(pre + "Wz")), p.get(pre + "bz")));
      Tensor r = tape.sigmoid(tape.add(tape.matmul(cat, p.get(pre + "Wr")), p.get(pre + "br")));
      Tensor gated = tape.concat_cols(tape.mul_elem(r, h), x);
      hh = tape.tanh(tape.add(tape.matmul(gated, p.get(pre + "Wh")), p.get(pre + "bh")));
    }
    h = tape.add(tape.mul_elem(tape.sub(ones, z), h), tape.mul_elem(z, hh));
    hidden.push_back(h);
  }
  return hidden;
}

}  // namespace

Tensor gru_forward(Tape& tape, const std::vector<Tensor>& steps, const ModelParams& params,
                   const ModelConfig& cfg) {
  if (steps.empty()) throw ContractError("recurrent encoder requires a non-empty sequence");
  std::vector<Tensor> h1 = gru_layer(tape, steps, params, cfg, 1);
  std::vector<Tensor> h2 = gru_layer(tape, h1, params, cfg, 2);
  return h2.back();
}

Tensor encode_global(Tape& tape, const Snapshot& snapshot,
                     const std::vector<std::vector<int>>& summaries, const Tensor& features,
                     const ModelParams& params, const ModelConfig& cfg) {
  if (static_cast<int>(summaries.size()) != snapshot.node_count)
    throw DataError("walk cache covers " + std::to_string(summaries.size()) +
                    " nodes but snapshot " + std::to_string(snapshot.index) + " has " +
                    std::to_string(snapshot.node_count));
  std::vector<Tensor> steps;
  steps.reserve(cfg.top_k);
  for (int i = 0; i < cfg.top_k; ++i) {
    std::vector<int> idx(snapshot.node_count);
    for (int u = 0; u < snapshot.node_count; ++u) {
      const auto& s = summaries[u];
      idx[u] = i < static_cast<int>(s.size()) ? s[i] : u;  // pad with the source
    }
    steps.push_back(tape.gather_rows(features, idx));
  }
  Tensor out = gru_forward(tape, steps, params, cfg);
  // Isolated nodes (empty summaries) carry no global signal: zero their rows.
  Tensor mask = Tensor::full(snapshot.node_count, cfg.hidden_dim, 1.0);
  for (int u = 0; u < snapshot.node_count; ++u)
    if (summaries[u].empty())
      for (int c = 0; c < cfg.hidden_dim; ++c) mask.at(u, c) = 0.0;
  return tape.mul_elem(out, mask);
}

Tensor cross_attention(Tape& tape, const Tensor& local, const Tensor& global,
                       const ModelParams& params, const ModelConfig& cfg) {
  if (local.rows() != global.rows() || local.cols() != global.cols())
    throw ShapeError("fusion inputs disagree: " + local.shape_str() + " vs " +
                     global.shape_str());
  Tensor q = tape.matmul(local, params.get("attn.Wq"));
  Tensor k = tape.matmul(global, params.get("attn.Wk"));
  Tensor v = tape.matmul(global, params.get("attn.Wv"));
  Tensor logits = tape.scale(tape.matmul(q, tape.transpose(k)), 1.0 / std::sqrt(cfg.hidden_dim));
  return tape.matmul(tape.softmax_rows(logits), v);
}

Tensor edge_scores(Tape& tape, const Tensor& embeddings,
                   const std::vector<std::pair<int, int>>& edges) {
  if (edges.empty()) throw ContractError("edge scoring requires at least one edge");
  std::vector<int> us, vs;
  us.reserve(edges.size());
  vs.reserve(edges.size());
  for (const auto& [u, v] : edges) {
    us.push_back(u);
    vs.push_back(v);
  }
  Tensor hu = tape.gather_rows(embeddings, us);
  Tensor hv = tape.gather_rows(embeddings, vs);
  return tape.sigmoid(tape.row_sum(tape.mul_elem(hu, hv)));
}

double score_edge(const Tensor& embeddings, int u, int v) {
  double dot = 0.0;
  for (int c = 0; c < embeddings.cols(); ++c) dot += embeddings.at(u, c) * embeddings.at(v, c);
  return dot >= 0 ? 1.0 / (1.0 + std::exp(-dot)) : std::exp(dot) / (1.0 + std::exp(dot));
}

Tensor bce_loss(Tape& tape, const Tensor& scores, const std::vector<double>& labels) {
  if (scores.cols() != 1 || scores.rows() != static_cast<int>(labels.size()))
    throw ShapeError("scores " + scores.shape_str() + " do not match " +
                     std::to_string(labels.size()) + " labels");
  if (labels.empty()) throw ContractError("loss over an empty edge set");
  const int m = scores.rows();
  Tensor y = Tensor::from_data(m, 1, labels);
  Tensor y_inv = Tensor::zeros(m, 1);
  for (int i = 0; i < m; ++i) y_inv.at(i, 0) = 1.0 - labels[i];
  Tensor ones = Tensor::full(m, 1, 1.0);
  const double eps = 1e-12;
  Tensor s = tape.clamp(scores, eps, 1.0 - eps);
  Tensor pos = tape.mul_elem(y, tape.log(s));
  Tensor neg = tape.mul_elem(y_inv, tape.log(tape.sub(ones, s)));
  return tape.scale(tape.mean_scalar(tape.add(pos, neg)), -1.0);
}

}  // namespace dygssm
