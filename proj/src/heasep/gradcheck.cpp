#include "heasep/gradcheck.hpp"

#include <cmath>
#include <vector>

namespace heasep::nc {

GradCheckReport grad_check(const std::function<Tensor()>& f,
                           std::span<const std::pair<std::string, Tensor>> params,
                           double eps) {
  GradCheckReport report;

  for (const auto& [name, p] : params) {
    Tensor t = p;
    t.zero_grad();
  }

  std::vector<std::vector<double>> analytic;
  {
    Tape tape;
    TapeScope scope(tape);
    Tensor loss = f();
    require(loss.size() == 1, ErrorKind::contract, "grad_check: f must return a scalar");
    if (!std::isfinite(loss.scalar())) {
      report.finite = false;
      report.worst = "f(p)";
      return report;
    }
    tape.backward(loss);
  }
  analytic.reserve(params.size());
  for (const auto& [name, p] : params) {
    Tensor t = p;
    analytic.push_back(t.grad());
    t.zero_grad();
  }

  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor t = params[k].second;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double original = t.data()[i];
      t.data()[i] = original + eps;
      const double f_plus = f().scalar();
      t.data()[i] = original - eps;
      const double f_minus = f().scalar();
      t.data()[i] = original;
      if (!std::isfinite(f_plus) || !std::isfinite(f_minus)) {
        report.finite = false;
        report.worst = params[k].first + "[" + std::to_string(i) + "]";
        return report;
      }
      const double numeric = (f_plus - f_minus) / (2.0 * eps);
      const double g = analytic[k][i];
      const double denom = std::max({std::fabs(g), std::fabs(numeric), 1e-8});
      const double rel = std::fabs(g - numeric) / denom;
      if (rel > report.max_rel_error) {
        report.max_rel_error = rel;
        report.worst = params[k].first + "[" + std::to_string(i) + "]";
      }
    }
  }
  return report;
}

}  // namespace heasep::nc
