#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dygssm/tensor.hpp"

namespace dygssm {

struct GradCheckResult {
  double max_rel_err = 0.0;
  std::string worst_param;  // "name[i]" of the worst entry
  double analytic = 0.0;    // gradient at the worst entry
  double numeric = 0.0;     // central difference at the worst entry

  bool ok(double tol) const { return max_rel_err < tol; }
};

// Central-difference check of reverse-mode gradients. `loss` must rebuild
// the whole forward pass from current parameter values on the tape it is
// given; it is invoked 2N+1 times for N total parameter entries.
//
// Relative error uses max(|analytic|, |numeric|, 1e-5) in the denominator so
// near-zero gradients are compared on an absolute scale instead of blowing
// up on finite-difference noise.
GradCheckResult grad_check(const std::vector<std::pair<std::string, Tensor>>& params,
                           const std::function<Tensor(Tape&)>& loss, double h = 1e-5);

}  // namespace dygssm
