#include "dygssm/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "dygssm/errors.hpp"

namespace dygssm {

GradCheckResult grad_check(const std::vector<std::pair<std::string, Tensor>>& params,
                           const std::function<Tensor(Tape&)>& loss, double h) {
  for (const auto& [name, p] : params) {
    if (!p.requires_grad()) throw ContractError("grad_check parameter '" + name + "' is frozen");
    Tensor t = p;
    t.zero_grad();
  }

  {
    Tape tape;
    Tensor l = loss(tape);
    tape.backward(l);
  }

  GradCheckResult result;
  for (const auto& [name, p] : params) {
    Tensor t = p;  // handle copy: perturbations hit shared storage
    auto values = t.data();
    auto analytic = t.grad();
    for (std::int64_t i = 0; i < t.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + h;
      Tape tp;
      const double up = loss(tp).at(0, 0);
      values[i] = saved - h;
      Tape tm;
      const double down = loss(tm).at(0, 0);
      values[i] = saved;

      const double numeric = (up - down) / (2.0 * h);
      const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-5});
      const double rel = std::abs(analytic[i] - numeric) / denom;
      if (rel > result.max_rel_err) {
        result.max_rel_err = rel;
        result.worst_param = name + "[" + std::to_string(i) + "]";
        result.analytic = analytic[i];
        result.numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace dygssm
