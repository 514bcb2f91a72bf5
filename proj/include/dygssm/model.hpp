#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dygssm/graph.hpp"
#include "dygssm/rng.hpp"
#include "dygssm/tensor.hpp"
#include "dygssm/walk.hpp"

namespace dygssm {

// Optimizer-facing parameter partition: the fused loss updates gcn + attn,
// the global loss updates gru.
enum class ParamGroup { gcn, gru, attn };

std::string to_string(ParamGroup g);

struct ModelConfig {
  int node_count = 0;
  int feature_dim = 64;   // m (table mode; one_hot forces m = n, degree m = 1)
  int hidden_dim = 64;    // d, also the attention key dim d_k
  int top_k = 5;          // walked-sequence length fed to the GRU
  bool light_gru = false;
  std::string activation = "relu";    // or "tanh"
  std::string feature_mode = "table";  // or "one_hot", "degree"

  void validate() const;
  // Feature width actually used, after the mode override.
  int effective_feature_dim() const;
};

// Named parameter tensors with deterministic iteration order. Updates that
// replace a tensor (the state-space inner step) swap the handle, leaving
// earlier versions alive on whatever tape recorded them.
class ModelParams {
 public:
  void add(const std::string& name, ParamGroup group, Tensor t);
  bool has(const std::string& name) const { return tensors_.count(name) > 0; }
  const Tensor& get(const std::string& name) const;
  void set(const std::string& name, Tensor t);
  ParamGroup group_of(const std::string& name) const;

  const std::vector<std::string>& names() const { return names_; }
  std::vector<std::pair<std::string, Tensor>> all() const;
  std::vector<std::pair<std::string, Tensor>> in_group(ParamGroup group) const;

  std::int64_t count(ParamGroup group) const;
  std::int64_t count_total() const;

  void zero_grad();
  // Deep copy (fresh storage for every tensor).
  ModelParams clone() const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Tensor> tensors_;
  std::unordered_map<std::string, ParamGroup> groups_;
};

// Glorot-uniform weights, zero biases, deterministic per seed. Per-tensor
// streams are derived from the name, so the result does not depend on
// construction order.
ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed);

// Closed-form recurrent-encoder parameter counts for one layer stack
// (two layers, first consuming d_in, second consuming d_h).
std::int64_t full_gru_param_count(int d_in, int d_h);
std::int64_t light_gru_param_count(int d_in, int d_h);

// Node feature matrix for a snapshot: the trainable table, a one-hot
// identity, or per-snapshot degree counts depending on cfg.feature_mode.
Tensor features_for(const Snapshot& snapshot, const ModelParams& params, const ModelConfig& cfg);

// Two GCN layers with skip connections:
//   H = act(Â H_prev W);  out = (H O + b_O) + (H_prev J + b_J).
Tensor gcn_forward(Tape& tape, const CsrMatrix& norm_adj, const Tensor& features,
                   const ModelParams& params, const ModelConfig& cfg);

// Two-layer recurrent encoder over `steps` (each n x d_in, one per sequence
// position); returns the final hidden state of layer 2 (n x d).
Tensor gru_forward(Tape& tape, const std::vector<Tensor>& steps, const ModelParams& params,
                   const ModelConfig& cfg);

// Walk-summary sequences -> feature rows -> gru_forward. Summaries shorter
// than top_k (isolated or near-isolated sources) are padded with the source
// node itself.
Tensor encode_global(Tape& tape, const Snapshot& snapshot,
                     const std::vector<std::vector<int>>& summaries, const Tensor& features,
                     const ModelParams& params, const ModelConfig& cfg);

// Single-head attention with the local embeddings as queries:
//   softmax_rows(Q K^T / sqrt(d_k)) V,  Q = local Wq, K/V = global Wk/Wv.
Tensor cross_attention(Tape& tape, const Tensor& local, const Tensor& global,
                       const ModelParams& params, const ModelConfig& cfg);

// sigmoid(h_u . h_v) for each (u, v); returns an |edges| x 1 column.
Tensor edge_scores(Tape& tape, const Tensor& embeddings,
                   const std::vector<std::pair<int, int>>& edges);

// Tape-free scalar convenience used by evaluation.
double score_edge(const Tensor& embeddings, int u, int v);

// Mean binary cross-entropy of `scores` against 0/1 labels, scores clamped
// to [1e-12, 1 - 1e-12].
Tensor bce_loss(Tape& tape, const Tensor& scores, const std::vector<double>& labels);

}  // namespace dygssm
