#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dygssm/sparse.hpp"

namespace dygssm {

// Dense 2-D tensor of doubles. A Tensor is a cheap handle onto shared
// storage; ops on a Tape produce fresh tensors and never mutate inputs.
// The gradient buffer is allocated lazily on first accumulation.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(int rows, int cols, bool requires_grad = false);
  static Tensor full(int rows, int cols, double value, bool requires_grad = false);
  static Tensor from_data(int rows, int cols, std::vector<double> data,
                          bool requires_grad = false);
  // Row-literal constructor for tests and small fixtures.
  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows,
                          bool requires_grad = false);

  bool defined() const { return impl_ != nullptr; }
  int rows() const;
  int cols() const;
  std::int64_t size() const;

  bool requires_grad() const;
  void set_requires_grad(bool value);

  double at(int r, int c) const;
  double& at(int r, int c);
  std::span<double> data();
  std::span<const double> data() const;

  bool has_grad() const;
  // Gradient buffer, zero-allocated on demand.
  std::span<double> grad();
  std::span<const double> grad() const;
  void zero_grad();
  void accumulate_grad(const double* g, std::int64_t n);

  // Deep copy of the values (gradient buffer is not copied).
  Tensor clone() const;
  // Value copy with no gradient participation.
  Tensor detached() const;

  bool same_storage(const Tensor& other) const { return impl_ == other.impl_; }
  bool all_finite() const;

  std::string shape_str() const;

 private:
  struct Impl {
    int rows = 0;
    int cols = 0;
    bool requires_grad = false;
    std::vector<double> values;
    std::vector<double> grad;  // empty until first accumulation
  };

  std::shared_ptr<Impl> impl_;
};

// Reverse-mode tape. Rebuilt per forward pass (define-by-run): each primitive
// records a node when any input requires grad, and backward() visits nodes in
// exact reverse recording order. A tape is single-threaded; independent tapes
// may run concurrently on disjoint parameter copies.
class Tape {
 public:
  Tensor matmul(const Tensor& a, const Tensor& b);
  // x = adj * h for a symmetric sparse operator (backward reuses adj).
  Tensor spmm(const CsrMatrix& adj, const Tensor& h);
  Tensor transpose(const Tensor& a);
  // add/mul_elem accept b of shape 1 x a.cols, broadcast across rows.
  Tensor add(const Tensor& a, const Tensor& b);
  Tensor sub(const Tensor& a, const Tensor& b);
  Tensor mul_elem(const Tensor& a, const Tensor& b);
  Tensor concat_cols(const Tensor& a, const Tensor& b);
  Tensor sigmoid(const Tensor& a);
  Tensor tanh(const Tensor& a);
  Tensor relu(const Tensor& a);
  // log with the input floored at `floor` (gradient is zero where floored).
  Tensor log(const Tensor& a, double floor = 1e-12);
  // Row-max-subtracted softmax per row.
  Tensor softmax_rows(const Tensor& a);
  Tensor scale(const Tensor& a, double c);
  Tensor clamp(const Tensor& a, double lo, double hi);
  // Mean over all entries, returned as a 1x1 tensor.
  Tensor mean_scalar(const Tensor& a);
  // Sum across columns: (r x c) -> (r x 1).
  Tensor row_sum(const Tensor& a);
  // out[i] = a[idx[i]]; backward scatter-adds into the gathered rows.
  Tensor gather_rows(const Tensor& a, std::vector<int> idx);

  // Populates grad on every reachable requires_grad tensor with d(loss)/d(t).
  // loss must be 1x1. Gradients of tensors used several times accumulate.
  // The tape is cleared afterwards unless clear = false.
  void backward(const Tensor& loss, bool clear = true);

  std::size_t node_count() const { return nodes_.size(); }
  void clear() { nodes_.clear(); }

 private:
  struct Node {
    Tensor output;
    std::function<void()> pull;  // accumulates output grad into input grads
  };

  // Records the node if out requires grad; returns out either way.
  Tensor finish(Tensor out, bool any_grad, std::function<void()> pull);

  std::vector<Node> nodes_;
};

}  // namespace dygssm
