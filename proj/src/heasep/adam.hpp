#ifndef HEASEP_ADAM_HPP
#define HEASEP_ADAM_HPP

#include <cstddef>
#include <vector>

#include "heasep/tensor.hpp"

namespace heasep::nc {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction. step() consumes the gradients accumulated in
// the parameters' grad slots and zeroes them afterwards. A step that sees
// any non-finite gradient is skipped entirely (parameters untouched,
// gradients discarded) and reported via the return value.
class Adam {
 public:
  Adam(AdamConfig config, std::vector<Tensor> params);

  bool step();

  std::size_t step_count() const { return step_count_; }
  std::size_t skipped_steps() const { return skipped_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  std::vector<Tensor> params_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::size_t step_count_ = 0;
  std::size_t skipped_ = 0;
};

}  // namespace heasep::nc

#endif
