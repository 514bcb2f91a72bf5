#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dygssm/model.hpp"
#include "dygssm/tensor.hpp"

namespace dygssm {

// Lower-triangular projection matrix with entries
//   K[i][j] = (-1)^{i-j} (2i+1) for i > j,  2 on the diagonal,  0 above,
// using 0-based indices (n = 1 gives [[2]]).
Tensor hippo_matrix(int n);

// 1 / (loss + eps): snapshots with higher loss push less history into the
// state. Strictly positive, strictly decreasing.
double dynamic_weight(double loss, double eps = 1e-8);

enum class SsmMode { descent, verbatim };

SsmMode parse_ssm_mode(const std::string& name);
std::string to_string(SsmMode mode);

// Per-parameter recurrent gradient state s_t, advanced once per snapshot as
//   s_t = K s_{t-1} + g weight
// applied on contiguous blocks of the flattened gradient (block_size rows of
// K; the final partial block behaves as if zero-padded). States mirror their
// parameter's shape so the elementwise update below is well-defined.
class SsmState {
 public:
  SsmState() = default;
  SsmState(const std::vector<std::pair<std::string, Tensor>>& params, int block_size);

  void reset();
  bool tracks(const std::string& name) const { return state_.count(name) > 0; }
  const Tensor& state(const std::string& name) const;
  Tensor& state(const std::string& name);
  const std::vector<std::string>& names() const { return names_; }
  int block_size() const { return block_size_; }

  // One recurrence step for one parameter's gradient.
  void step(const std::string& name, std::span<const double> grad, double weight);

 private:
  int block_size_ = 64;
  Tensor hippo_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, Tensor> state_;
};

// State-space parameter update. Descent mode (default) treats the state as
// a history-aware correction: theta - eta (grad + theta * s). Verbatim mode
// applies the replacement rule theta' = grad + theta * s as literally
// written, kept for fidelity experiments. Returns a fresh tensor with
// requires_grad copied from theta; throws NumericError on non-finite output.
Tensor apply_ssm_update(const Tensor& theta, std::span<const double> grad, const Tensor& state,
                        double eta, SsmMode mode);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Standard bias-corrected Adam over named tensors; moments are created on
// first sight of a name. One step() call advances the shared step counter
// once, whatever the number of tensors updated.
class AdamState {
 public:
  explicit AdamState(AdamConfig cfg = {}) : cfg_(cfg) {}

  void step(ModelParams& params,
            const std::vector<std::pair<std::string, std::vector<double>>>& grads);

  std::int64_t steps_taken() const { return step_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  std::int64_t step_ = 0;
  std::unordered_map<std::string, std::vector<double>> m_, v_;
};

}  // namespace dygssm
