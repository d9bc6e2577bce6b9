#ifndef HEASEP_PARAMS_HPP
#define HEASEP_PARAMS_HPP

#include <string>
#include <utility>
#include <vector>

#include "heasep/rng.hpp"
#include "heasep/tensor.hpp"

namespace heasep::nc {

// Named learned tensors, insertion-ordered. The order defines the tensor
// directory order in checkpoints and the optimizer state layout.
class ParamStore {
 public:
  Tensor create(const std::string& name, std::vector<int> shape, Rng& rng);
  Tensor create_zero(const std::string& name, std::vector<int> shape);

  // Registers an externally built tensor (checkpoint loading).
  void put(const std::string& name, Tensor t);

  Tensor get(const std::string& name) const;
  bool contains(const std::string& name) const;

  const std::vector<std::pair<std::string, Tensor>>& entries() const { return entries_; }
  std::vector<Tensor> tensors() const;
  std::size_t size() const { return entries_.size(); }

  void zero_grads();

  // Rounds every parameter through 32-bit precision; after this, in-memory
  // predictions match predictions from a reloaded checkpoint bit for bit.
  void round_to_f32();

 private:
  std::vector<std::pair<std::string, Tensor>> entries_;
};

// uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) with fan_in = row length.
void init_uniform(Tensor& t, Rng& rng);

}  // namespace heasep::nc

#endif
