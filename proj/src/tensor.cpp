#include "dygssm/tensor.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <utility>

#include "dygssm/errors.hpp"

namespace dygssm {

namespace {

using EigenRowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const EigenRowMat>;
using MutMap = Eigen::Map<EigenRowMat>;

void require(bool ok, const std::string& msg) {
  if (!ok) throw ShapeError(msg);
}

}  // namespace

// ---------------------------------------------------------------- Tensor

Tensor Tensor::zeros(int rows, int cols, bool requires_grad) {
  return from_data(rows, cols, std::vector<double>(static_cast<std::size_t>(rows) * cols, 0.0),
                   requires_grad);
}

Tensor Tensor::full(int rows, int cols, double value, bool requires_grad) {
  return from_data(rows, cols, std::vector<double>(static_cast<std::size_t>(rows) * cols, value),
                   requires_grad);
}

Tensor Tensor::from_data(int rows, int cols, std::vector<double> data, bool requires_grad) {
  if (rows < 0 || cols < 0 ||
      data.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw ShapeError("tensor data length " + std::to_string(data.size()) +
                     " does not match shape " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  Tensor t;
  t.impl_ = std::make_shared<Impl>();
  t.impl_->rows = rows;
  t.impl_->cols = cols;
  t.impl_->requires_grad = requires_grad;
  t.impl_->values = std::move(data);
  return t;
}

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rows,
                         bool requires_grad) {
  const int r = static_cast<int>(rows.size());
  const int c = r == 0 ? 0 : static_cast<int>(rows.begin()->size());
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(r) * c);
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != c) throw ShapeError("ragged row literal");
    data.insert(data.end(), row.begin(), row.end());
  }
  return from_data(r, c, std::move(data), requires_grad);
}

int Tensor::rows() const { return impl_ ? impl_->rows : 0; }
int Tensor::cols() const { return impl_ ? impl_->cols : 0; }
std::int64_t Tensor::size() const {
  return impl_ ? static_cast<std::int64_t>(impl_->values.size()) : 0;
}

bool Tensor::requires_grad() const { return impl_ && impl_->requires_grad; }
void Tensor::set_requires_grad(bool value) { impl_->requires_grad = value; }

double Tensor::at(int r, int c) const {
  return impl_->values[static_cast<std::size_t>(r) * impl_->cols + c];
}
double& Tensor::at(int r, int c) {
  return impl_->values[static_cast<std::size_t>(r) * impl_->cols + c];
}

std::span<double> Tensor::data() { return impl_->values; }
std::span<const double> Tensor::data() const { return impl_->values; }

bool Tensor::has_grad() const { return impl_ && !impl_->grad.empty(); }

std::span<double> Tensor::grad() {
  if (impl_->grad.empty()) impl_->grad.assign(impl_->values.size(), 0.0);
  return impl_->grad;
}

std::span<const double> Tensor::grad() const {
  static const std::vector<double> empty;
  return impl_->grad.empty() ? std::span<const double>(empty) : std::span<const double>(impl_->grad);
}

void Tensor::zero_grad() {
  if (impl_ && !impl_->grad.empty()) std::fill(impl_->grad.begin(), impl_->grad.end(), 0.0);
}

void Tensor::accumulate_grad(const double* g, std::int64_t n) {
  auto dst = grad();
  for (std::int64_t i = 0; i < n; ++i) dst[i] += g[i];
}

Tensor Tensor::clone() const {
  Tensor t = from_data(rows(), cols(), impl_->values, impl_->requires_grad);
  return t;
}

Tensor Tensor::detached() const { return from_data(rows(), cols(), impl_->values, false); }

bool Tensor::all_finite() const {
  for (double v : impl_->values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string Tensor::shape_str() const {
  return std::to_string(rows()) + "x" + std::to_string(cols());
}

// ------------------------------------------------------------------ Tape

Tensor Tape::finish(Tensor out, bool any_grad, std::function<void()> pull) {
  if (any_grad) {
    out.set_requires_grad(true);
    nodes_.push_back(Node{out, std::move(pull)});
  }
  return out;
}

Tensor Tape::matmul(const Tensor& a, const Tensor& b) {
  require(a.cols() == b.rows(), "matmul shape mismatch: " + a.shape_str() + " * " + b.shape_str());
  Tensor out = Tensor::zeros(a.rows(), b.cols());
  {
    ConstMap ma(a.data().data(), a.rows(), a.cols());
    ConstMap mb(b.data().data(), b.rows(), b.cols());
    MutMap mo(out.data().data(), out.rows(), out.cols());
    mo.noalias() = ma * mb;
  }
  return finish(out, a.requires_grad() || b.requires_grad(), [a = a, b = b, out]() mutable {
    if (!out.has_grad()) return;
    ConstMap g(out.grad().data(), out.rows(), out.cols());
    if (a.requires_grad()) {
      ConstMap mb(b.data().data(), b.rows(), b.cols());
      MutMap ga(a.grad().data(), a.rows(), a.cols());
      ga.noalias() += g * mb.transpose();
    }
    if (b.requires_grad()) {
      ConstMap ma(a.data().data(), a.rows(), a.cols());
      MutMap gb(b.grad().data(), b.rows(), b.cols());
      gb.noalias() += ma.transpose() * g;
    }
  });
}

Tensor Tape::spmm(const CsrMatrix& adj, const Tensor& h) {
  require(adj.cols == h.rows(),
          "spmm shape mismatch: " + std::to_string(adj.rows) + "x" + std::to_string(adj.cols) +
              " * " + h.shape_str());
  Tensor out = Tensor::zeros(adj.rows, h.cols());
  adj.multiply(h.data().data(), h.cols(), out.data().data());
  const CsrMatrix* op = &adj;  // operators outlive the tape (owned by the caller)
  return finish(out, h.requires_grad(), [op, h = h, out]() mutable {
    if (!out.has_grad() || !h.requires_grad()) return;
    std::vector<double> tmp(h.grad().size(), 0.0);
    op->multiply(out.grad().data(), out.cols(), tmp.data());
    h.accumulate_grad(tmp.data(), static_cast<std::int64_t>(tmp.size()));
  });
}

Tensor Tape::transpose(const Tensor& a) {
  Tensor out = Tensor::zeros(a.cols(), a.rows());
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) out.at(c, r) = a.at(r, c);
  return finish(out, a.requires_grad(), [a = a, out]() mutable {
    if (!out.has_grad()) return;
    auto g = out.grad();
    auto ga = a.grad();
    for (int r = 0; r < a.rows(); ++r)
      for (int c = 0; c < a.cols(); ++c)
        ga[static_cast<std::size_t>(r) * a.cols() + c] +=
            g[static_cast<std::size_t>(c) * a.rows() + r];
  });
}

namespace {

enum class Broadcast { none, row_bias };

Broadcast broadcast_kind(const Tensor& a, const Tensor& b, const char* op) {
  if (a.rows() == b.rows() && a.cols() == b.cols()) return Broadcast::none;
  if (b.rows() == 1 && b.cols() == a.cols()) return Broadcast::row_bias;
  throw ShapeError(std::string(op) + " shape mismatch: " + a.shape_str() + " vs " + b.shape_str());
}

}  // namespace

Tensor Tape::add(const Tensor& a, const Tensor& b) {
  const Broadcast bc = broadcast_kind(a, b, "add");
  Tensor out = Tensor::zeros(a.rows(), a.cols());
  auto oa = a.data();
  auto ob = b.data();
  auto oo = out.data();
  const int cols = a.cols();
  for (std::int64_t i = 0; i < a.size(); ++i)
    oo[i] = oa[i] + (bc == Broadcast::none ? ob[i] : ob[i % cols]);
  return finish(out, a.requires_grad() || b.requires_grad(), [a = a, b = b, out, bc]() mutable {
    if (!out.has_grad()) return;
    auto g = out.grad();
    if (a.requires_grad()) a.accumulate_grad(g.data(), a.size());
    if (b.requires_grad()) {
      if (bc == Broadcast::none) {
        b.accumulate_grad(g.data(), b.size());
      } else {
        auto gb = b.grad();
        const int cols = b.cols();
        for (std::int64_t i = 0; i < out.size(); ++i) gb[i % cols] += g[i];
      }
    }
  });
}

Tensor Tape::sub(const Tensor& a, const Tensor& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(),
          "sub shape mismatch: " + a.shape_str() + " vs " + b.shape_str());
  Tensor out = Tensor::zeros(a.rows(), a.cols());
  auto oa = a.data();
  auto ob = b.data();
  auto oo = out.data();
  for (std::int64_t i = 0; i < a.size(); ++i) oo[i] = oa[i] - ob[i];
  return finish(out, a.requires_grad() || b.requires_grad(), [a = a, b = b, out]() mutable {
    if (!out.has_grad()) return;
    auto g = out.grad();
    if (a.requires_grad()) a.accumulate_grad(g.data(), a.size());
    if (b.requires_grad()) {
      auto gb = b.grad();
      for (std::int64_t i = 0; i < b.size(); ++i) gb[i] -= g[i];
    }
  });
}

Tensor Tape::mul_elem(const Tensor& a, const Tensor& b) {
  const Broadcast bc = broadcast_kind(a, b, "mul_elem");
  Tensor out = Tensor::zeros(a.rows(), a.cols());
  auto oa = a.data();
  auto ob = b.data();
  auto oo = out.data();
  const int cols = a.cols();
  for (std::int64_t i = 0; i < a.size(); ++i)
    oo[i] = oa[i] * (bc == Broadcast::none ? ob[i] : ob[i % cols]);
  return finish(out, a.requires_grad() || b.requires_grad(), [a = a, b = b, out, bc]() mutable {
    if (!out.has_grad()) return;
    auto g = out.grad();
    auto va = a.data();
    auto vb = b.data();
    const int cols = a.cols();
    if (a.requires_grad()) {
      auto ga = a.grad();
      for (std::int64_t i = 0; i < a.size(); ++i)
        ga[i] += g[i] * (bc == Broadcast::none ? vb[i] : vb[i % cols]);
    }
    if (b.requires_grad()) {
      auto gb = b.grad();
      if (bc == Broadcast::none) {
        for (std::int64_t i = 0; i < b.size(); ++i) gb[i] += g[i] * va[i];
      } else {
        for (std::int64_t i = 0; i < a.size(); ++i) gb[i % cols] += g[i] * va[i];
      }
    }
  });
}

Tensor Tape::concat_cols(const Tensor& a, const Tensor& b) {
  require(a.rows() == b.rows(),
          "concat_cols row mismatch: " + a.shape_str() + " vs " + b.shape_str());
  Tensor out = Tensor::zeros(a.rows(), a.cols() + b.cols());
  for (int r = 0; r < a.rows(); ++r) {
    for (int c = 0; c < a.cols(); ++c) out.at(r, c) = a.at(r, c);
    for (int c = 0; c < b.cols(); ++c) out.at(r, a.cols() + c) = b.at(r, c);
  }
  return finish(out, a.requires_grad() || b.requires_grad(), [a = a, b = b, out]() mutable {
    if (!out.has_grad()) return;
    auto g = out.grad();
    const int ac = a.cols();
    const int oc = out.cols();
    if (a.requires_grad()) {
      auto ga = a.grad();
      for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < ac; ++c)
          ga[static_cast<std::size_t>(r) * ac + c] += g[static_cast<std::size_t>(r) * oc + c];
    }
    if (b.requires_grad()) {
      auto gb = b.grad();
      const int bc = b.cols();
      for (int r = 0; r < b.rows(); ++r)
        for (int c = 0; c < bc; ++c)
          gb[static_cast<std::size_t>(r) * bc + c] += g[static_cast<std::size_t>(r) * oc + ac + c];
    }
  });
}

Tensor Tape::sigmoid(const Tensor& a) {
  Tensor out = Tensor::zeros(a.rows(), a.cols());
  auto oa = a.data();
  auto oo = out.data();
  for (std::int64_t i = 0; i < a.size(); ++i) {
    const double x = oa[i];
    // Split on sign to avoid exp overflow for large |x|.
    oo[i] = x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  }
  return finish(out, a.requires_grad(), [a = a, out]() mutable {
    if (!out.has_grad()) return;
    auto g = out.grad();
    auto y = out.data();
    auto ga = a.grad();
    for (std::int64_t i = 0; i < a.size(); ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
  });
}

Tensor Tape::tanh(const Tensor& a) {
  Tensor out = Tensor::zeros(a.rows(), a.cols());
  auto oa = a.data();
  auto oo = out.data();
  for (std::int64_t i = 0; i < a.size(); ++i) oo[i] = std::tanh(oa[i]);
  return finish(out, a.requires_grad(), [a = a, out]() mutable {
    if (!out.has_grad()) return;
    auto g = out.grad();
    auto y = out.data();
    auto ga = a.grad();
    for (std::int64_t i = 0; i < a.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
  });
}

Tensor Tape::relu(const Tensor& a) {
  Tensor out = Tensor::zeros(a.rows(), a.cols());
  auto oa = a.data();
  auto oo = out.data();
  for (std::int64_t i = 0; i < a.size(); ++i) oo[i] = oa[i] > 0 ? oa[i] : 0.0;
  return finish(out, a.requires_grad(), [a = a, out]() mutable {
    if (!out.has_grad()) return;
    auto g = out.grad();
    auto x = a.data();
    auto ga = a.grad();
    for (std::int64_t i = 0; i < a.size(); ++i)
      if (x[i] > 0) ga[i] += g[i];
  });
}

Tensor Tape::log(const Tensor& a, double floor) {
  Tensor out = Tensor::zeros(a.rows(), a.cols());
  auto oa = a.data();
  auto oo = out.data();
  for (std::int64_t i = 0; i < a.size(); ++i) oo[i] = std::log(std::max(oa[i], floor));
  return finish(out, a.requires_grad(), [a = a, out, floor]() mutable {
    if (!out.has_grad()) return;
    auto g = out.grad();
    auto x = a.data();
    auto ga = a.grad();
    for (std::int64_t i = 0; i < a.size(); ++i)
      if (x[i] > floor) ga[i] += g[i] / x[i];
  });
}

Tensor Tape::softmax_rows(const Tensor& a) {
  Tensor out = Tensor::zeros(a.rows(), a.cols());
  const int cols = a.cols();
  for (int r = 0; r < a.rows(); ++r) {
    double mx = a.at(r, 0);
    for (int c = 1; c < cols; ++c) mx = std::max(mx, a.at(r, c));
    double sum = 0.0;
    for (int c = 0; c < cols; ++c) {
      const double e = std::exp(a.at(r, c) - mx);
      out.at(r, c) = e;
      sum += e;
    }
    for (int c = 0; c < cols; ++c) out.at(r, c) /= sum;
  }
  return finish(out, a.requires_grad(), [a = a, out]() mutable {
    if (!out.has_grad()) return;
    auto g = out.grad();
    auto y = out.data();
    auto ga = a.grad();
    const int cols = a.cols();
    for (int r = 0; r < a.rows(); ++r) {
      const std::size_t base = static_cast<std::size_t>(r) * cols;
      double dot = 0.0;
      for (int c = 0; c < cols; ++c) dot += g[base + c] * y[base + c];
      for (int c = 0; c < cols; ++c) ga[base + c] += y[base + c] * (g[base + c] - dot);
    }
  });
}

Tensor Tape::scale(const Tensor& a, double c) {
  Tensor out = Tensor::zeros(a.rows(), a.cols());
  auto oa = a.data();
  auto oo = out.data();
  for (std::int64_t i = 0; i < a.size(); ++i) oo[i] = oa[i] * c;
  return finish(out, a.requires_grad(), [a = a, out, c]() mutable {
    if (!out.has_grad()) return;
    auto g = out.grad();
    auto ga = a.grad();
    for (std::int64_t i = 0; i < a.size(); ++i) ga[i] += g[i] * c;
  });
}

Tensor Tape::clamp(const Tensor& a, double lo, double hi) {
  Tensor out = Tensor::zeros(a.rows(), a.cols());
  auto oa = a.data();
  auto oo = out.data();
  for (std::int64_t i = 0; i < a.size(); ++i) oo[i] = std::min(std::max(oa[i], lo), hi);
  return finish(out, a.requires_grad(), [a = a, out, lo, hi]() mutable {
    if (!out.has_grad()) return;
    auto g = out.grad();
    auto x = a.data();
    auto ga = a.grad();
    for (std::int64_t i = 0; i < a.size(); ++i)
      if (x[i] > lo && x[i] < hi) ga[i] += g[i];
  });
}

Tensor Tape::mean_scalar(const Tensor& a) {
  if (a.size() == 0) throw ContractError("mean_scalar of an empty tensor");
  Tensor out = Tensor::zeros(1, 1);
  double sum = 0.0;
  for (double v : a.data()) sum += v;
  out.at(0, 0) = sum / static_cast<double>(a.size());
  return finish(out, a.requires_grad(), [a = a, out]() mutable {
    if (!out.has_grad()) return;
    const double g = out.grad()[0] / static_cast<double>(a.size());
    auto ga = a.grad();
    for (std::int64_t i = 0; i < a.size(); ++i) ga[i] += g;
  });
}

Tensor Tape::row_sum(const Tensor& a) {
  Tensor out = Tensor::zeros(a.rows(), 1);
  for (int r = 0; r < a.rows(); ++r) {
    double s = 0.0;
    for (int c = 0; c < a.cols(); ++c) s += a.at(r, c);
    out.at(r, 0) = s;
  }
  return finish(out, a.requires_grad(), [a = a, out]() mutable {
    if (!out.has_grad()) return;
    auto g = out.grad();
    auto ga = a.grad();
    const int cols = a.cols();
    for (int r = 0; r < a.rows(); ++r)
      for (int c = 0; c < cols; ++c) ga[static_cast<std::size_t>(r) * cols + c] += g[r];
  });
}

Tensor Tape::gather_rows(const Tensor& a, std::vector<int> idx) {
  for (int i : idx) {
    if (i < 0 || i >= a.rows())
      throw ShapeError("gather_rows index " + std::to_string(i) + " out of range for " +
                       a.shape_str());
  }
  Tensor out = Tensor::zeros(static_cast<int>(idx.size()), a.cols());
  const int cols = a.cols();
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (int c = 0; c < cols; ++c) out.at(static_cast<int>(r), c) = a.at(idx[r], c);
  return finish(out, a.requires_grad(), [a = a, out, idx = std::move(idx)]() mutable {
    if (!out.has_grad()) return;
    auto g = out.grad();
    auto ga = a.grad();
    const int cols = a.cols();
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const std::size_t src = r * cols;
      const std::size_t dst = static_cast<std::size_t>(idx[r]) * cols;
      for (int c = 0; c < cols; ++c) ga[dst + c] += g[src + c];
    }
  });
}

void Tape::backward(const Tensor& loss, bool clear) {
  if (nodes_.empty()) throw ContractError("backward on an empty tape");
  if (loss.rows() != 1 || loss.cols() != 1)
    throw ContractError("backward requires a 1x1 loss, got " + loss.shape_str());
  // Node outputs may carry grads from an earlier pass on this tape; reset
  // them so each backward starts clean. Leaf grads are the caller's to manage.
  for (auto& node : nodes_) node.output.zero_grad();
  Tensor seed = loss;  // handle copy: shares storage
  seed.grad()[0] = 1.0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) it->pull();
  if (clear) nodes_.clear();
}

// ------------------------------------------------------------- CsrMatrix

void CsrMatrix::multiply(const double* x, int x_cols, double* y) const {
  std::fill(y, y + static_cast<std::size_t>(rows) * x_cols, 0.0);
  for (int r = 0; r < rows; ++r) {
    double* yr = y + static_cast<std::size_t>(r) * x_cols;
    for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      const double w = values[k];
      const double* xr = x + static_cast<std::size_t>(col_idx[k]) * x_cols;
      for (int c = 0; c < x_cols; ++c) yr[c] += w * xr[c];
    }
  }
}

std::vector<double> CsrMatrix::to_dense() const {
  std::vector<double> dense(static_cast<std::size_t>(rows) * cols, 0.0);
  for (int r = 0; r < rows; ++r)
    for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
      dense[static_cast<std::size_t>(r) * cols + col_idx[k]] = values[k];
  return dense;
}

bool CsrMatrix::is_symmetric(double tol) const {
  if (rows != cols) return false;
  // Column indices within each row are sorted by construction, so the
  // transposed entry can be found by binary search.
  for (int r = 0; r < rows; ++r) {
    for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      const int c = col_idx[k];
      const auto begin = col_idx.begin() + row_ptr[c];
      const auto end = col_idx.begin() + row_ptr[c + 1];
      const auto it = std::lower_bound(begin, end, r);
      if (it == end || *it != r) return false;
      if (std::abs(values[it - col_idx.begin()] - values[k]) > tol) return false;
    }
  }
  return true;
}

}  // namespace dygssm
