#include "dygssm/ssm.hpp"

#include <algorithm>
#include <cmath>

#include "dygssm/errors.hpp"

namespace dygssm {

Tensor hippo_matrix(int n) {
  if (n < 1) throw ConfigError("projection matrix dimension must be positive");
  Tensor k = Tensor::zeros(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) k.at(i, j) = ((i - j) % 2 == 0 ? 1.0 : -1.0) * (2.0 * i + 1.0);
    k.at(i, i) = 2.0;
  }
  return k;
}

double dynamic_weight(double loss, double eps) {
  if (loss < 0.0) throw ContractError("loss must be non-negative");
  if (eps <= 0.0) throw ContractError("weight epsilon must be positive");
  return 1.0 / (loss + eps);
}

SsmMode parse_ssm_mode(const std::string& name) {
  if (name == "descent") return SsmMode::descent;
  if (name == "verbatim") return SsmMode::verbatim;
  throw ConfigError("unknown state update mode: " + name);
}

std::string to_string(SsmMode mode) {
  return mode == SsmMode::descent ? "descent" : "verbatim";
}

SsmState::SsmState(const std::vector<std::pair<std::string, Tensor>>& params, int block_size)
    : block_size_(block_size), hippo_(hippo_matrix(block_size)) {
  if (block_size < 1) throw ConfigError("block size must be positive");
  for (const auto& [name, t] : params) {
    names_.push_back(name);
    state_.emplace(name, Tensor::zeros(t.rows(), t.cols()));
  }
}

void SsmState::reset() {
  for (auto& [name, t] : state_) std::fill(t.data().begin(), t.data().end(), 0.0);
}

const Tensor& SsmState::state(const std::string& name) const {
  auto it = state_.find(name);
  if (it == state_.end()) throw ContractError("no state tracked for parameter: " + name);
  return it->second;
}

Tensor& SsmState::state(const std::string& name) {
  auto it = state_.find(name);
  if (it == state_.end()) throw ContractError("no state tracked for parameter: " + name);
  return it->second;
}

void SsmState::step(const std::string& name, std::span<const double> grad, double weight) {
  Tensor& s = state(name);
  if (static_cast<std::int64_t>(grad.size()) != s.size())
    throw ContractError("gradient for " + name + " has " + std::to_string(grad.size()) +
                        " entries, state has " + std::to_string(s.size()));
  auto data = s.data();
  const int b = block_size_;
  std::vector<double> next(b);
  for (std::int64_t start = 0; start < s.size(); start += b) {
    const int len = static_cast<int>(std::min<std::int64_t>(b, s.size() - start));
    // K is lower-triangular, so entries past `len` never feed back into the
    // kept prefix; the partial final block needs no explicit padding.
    for (int i = 0; i < len; ++i) {
      double acc = 0.0;
      for (int j = 0; j <= i; ++j) acc += hippo_.at(i, j) * data[start + j];
      next[i] = acc + grad[start + i] * weight;
    }
    std::copy(next.begin(), next.begin() + len, data.begin() + start);
  }
}

Tensor apply_ssm_update(const Tensor& theta, std::span<const double> grad, const Tensor& state,
                        double eta, SsmMode mode) {
  if (static_cast<std::int64_t>(grad.size()) != theta.size() || state.size() != theta.size())
    throw ContractError("update inputs disagree in size for tensor " + theta.shape_str());
  Tensor out = Tensor::zeros(theta.rows(), theta.cols(), theta.requires_grad());
  auto ov = out.data();
  auto tv = theta.data();
  auto sv = state.data();
  for (std::int64_t i = 0; i < theta.size(); ++i) {
    const double correction = grad[i] + tv[i] * sv[i];
    ov[i] = mode == SsmMode::descent ? tv[i] - eta * correction : correction;
  }
  if (!out.all_finite())
    throw NumericError("state-space update produced non-finite values for a " +
                       theta.shape_str() + " tensor");
  return out;
}

void AdamState::step(ModelParams& params,
                     const std::vector<std::pair<std::string, std::vector<double>>>& grads) {
  ++step_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
  for (const auto& [name, grad] : grads) {
    Tensor t = params.get(name);
    if (static_cast<std::int64_t>(grad.size()) != t.size())
      throw ContractError("gradient size mismatch for " + name);
    auto& m = m_[name];
    auto& v = v_[name];
    if (m.empty()) {
      m.assign(grad.size(), 0.0);
      v.assign(grad.size(), 0.0);
    }
    auto data = t.data();
    for (std::size_t i = 0; i < grad.size(); ++i) {
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * grad[i];
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      data[i] -= cfg_.lr * m_hat / (std::sqrt(v_hat) + cfg_.eps);
    }
    if (!t.all_finite()) throw NumericError("optimizer produced non-finite values for " + name);
  }
}

}  // namespace dygssm
