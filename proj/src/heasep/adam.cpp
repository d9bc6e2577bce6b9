#include "heasep/adam.hpp"

#include <cmath>
#include <cstdio>

namespace heasep::nc {

Adam::Adam(AdamConfig config, std::vector<Tensor> params)
    : config_(config), params_(std::move(params)) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const Tensor& p : params_) {
    m_.emplace_back(p.size(), 0.0);
    v_.emplace_back(p.size(), 0.0);
  }
}

bool Adam::step() {
  for (Tensor& p : params_) {
    for (double g : p.grad())
      if (!std::isfinite(g)) {
        ++skipped_;
        std::fprintf(stderr, "heasep: warning: non-finite gradient, optimizer step skipped\n");
        for (Tensor& q : params_) q.zero_grad();
        return false;
      }
  }

  ++step_count_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_count_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_count_));

  for (std::size_t k = 0; k < params_.size(); ++k) {
    Tensor& p = params_[k];
    auto& grad = p.grad();
    auto& m = m_[k];
    auto& v = v_[k];
    double* value = p.data();
    for (std::size_t i = 0; i < grad.size(); ++i) {
      const double g = grad[i];
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g;
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g * g;
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      value[i] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
    p.zero_grad();
  }
  return true;
}

}  // namespace heasep::nc
