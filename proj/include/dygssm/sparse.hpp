#pragma once

#include <cstdint>
#include <vector>

namespace dygssm {

// Row-compressed sparse matrix. Adjacency operators built by the graph
// module are symmetric in both structure and values; Tape::spmm relies on
// that symmetry for its backward rule.
struct CsrMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::int64_t> row_ptr;  // size rows + 1
  std::vector<int> col_idx;
  std::vector<double> values;

  std::int64_t nnz() const { return static_cast<std::int64_t>(col_idx.size()); }

  // y = A * x, x and y dense row-major with x_cols columns. y is overwritten.
  void multiply(const double* x, int x_cols, double* y) const;

  std::vector<double> to_dense() const;

  bool is_symmetric(double tol = 0.0) const;
};

}  // namespace dygssm
