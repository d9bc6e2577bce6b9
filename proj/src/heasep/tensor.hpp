#ifndef HEASEP_TENSOR_HPP
#define HEASEP_TENSOR_HPP

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "heasep/error.hpp"

namespace heasep::nc {

// Dense row-major tensor of rank 0, 1 or 2, double precision. Copying a
// Tensor copies the handle, not the storage; ops allocate fresh outputs.
struct TensorData {
  std::vector<int> shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty until a backward pass touches it
  bool requires_grad = false;
};

class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::vector<int> shape, bool requires_grad = false);
  static Tensor from_values(std::vector<int> shape, std::vector<double> values,
                            bool requires_grad = false);
  static Tensor scalar_value(double v);

  bool defined() const { return d_ != nullptr; }
  const std::vector<int>& shape() const { return d_->shape; }
  int rank() const { return static_cast<int>(d_->shape.size()); }
  int rows() const { return d_->shape.empty() ? 1 : d_->shape[0]; }
  int cols() const { return rank() < 2 ? 1 : d_->shape[1]; }
  std::size_t size() const { return d_->value.size(); }

  double* data() { return d_->value.data(); }
  const double* data() const { return d_->value.data(); }
  std::vector<double>& values() { return d_->value; }
  const std::vector<double>& values() const { return d_->value; }

  double scalar() const {
    require(size() == 1, ErrorKind::contract, "Tensor::scalar: tensor is not a scalar");
    return d_->value[0];
  }

  bool requires_grad() const { return d_->requires_grad; }
  void set_requires_grad(bool v) { d_->requires_grad = v; }

  // Accumulated gradient; allocates a zero gradient on first access.
  std::vector<double>& grad();
  const std::vector<double>& grad_or_empty() const { return d_->grad; }
  void zero_grad();

  std::shared_ptr<TensorData> ptr() const { return d_; }
  bool same_storage(const Tensor& other) const { return d_ == other.d_; }

 private:
  explicit Tensor(std::shared_ptr<TensorData> d) : d_(std::move(d)) {}
  std::shared_ptr<TensorData> d_;

  friend Tensor make_tensor(std::vector<int>, bool);
};

Tensor make_tensor(std::vector<int> shape, bool requires_grad);

inline std::size_t shape_count(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) n *= static_cast<std::size_t>(d);
  return n;
}

// Reverse-mode tape. Entries are appended in evaluation order, which is a
// topological order by construction; backward replays them once in reverse.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Seeds d(loss)/d(loss) = 1 and propagates to every recorded input.
  // The tape is consumed: entries are cleared afterwards.
  void backward(const Tensor& loss);

  std::size_t size() const { return entries_.size(); }
  void clear() { entries_.clear(); }
  void push(std::function<void()> fn) { entries_.push_back(std::move(fn)); }

  static Tape* active();

 private:
  std::vector<std::function<void()>> entries_;
};

// RAII scope making a tape the active recording target for this thread.
// Ops record onto the active tape when any input requires a gradient; with
// no active tape they compute plain values (inference mode).
class TapeScope {
 public:
  explicit TapeScope(Tape& tape);
  ~TapeScope();
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape* previous_;
};

}  // namespace heasep::nc

#endif
