#ifndef HEASEP_GRADCHECK_HPP
#define HEASEP_GRADCHECK_HPP

#include <functional>
#include <span>
#include <string>
#include <utility>

#include "heasep/tensor.hpp"

namespace heasep::nc {

struct GradCheckReport {
  double max_rel_error = 0.0;
  bool finite = true;      // false when f produced a non-finite value
  std::string worst;       // "name[index]" of the worst component
};

// Compares tape gradients of a deterministic scalar function against central
// differences (f(p+eps) - f(p-eps)) / (2 eps), componentwise, with relative
// error denominator max(|g|, |g_num|, 1e-8). The function is evaluated
// under a tape once for the analytic pass and without a tape for the
// numeric probes. Parameter gradients are zeroed before and after.
GradCheckReport grad_check(const std::function<Tensor()>& f,
                           std::span<const std::pair<std::string, Tensor>> params,
                           double eps = 1e-5);

}  // namespace heasep::nc

#endif
