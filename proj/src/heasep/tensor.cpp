#include "heasep/tensor.hpp"

namespace heasep::nc {

namespace {
thread_local Tape* g_active_tape = nullptr;
}

Tensor make_tensor(std::vector<int> shape, bool requires_grad) {
  auto d = std::make_shared<TensorData>();
  d->shape = std::move(shape);
  d->value.assign(shape_count(d->shape), 0.0);
  d->requires_grad = requires_grad;
  return Tensor(std::move(d));
}

Tensor Tensor::zeros(std::vector<int> shape, bool requires_grad) {
  return make_tensor(std::move(shape), requires_grad);
}

Tensor Tensor::from_values(std::vector<int> shape, std::vector<double> values,
                           bool requires_grad) {
  Tensor t = make_tensor(std::move(shape), requires_grad);
  require(values.size() == t.size(), ErrorKind::contract,
          "Tensor::from_values: value count does not match shape");
  t.d_->value = std::move(values);
  return t;
}

Tensor Tensor::scalar_value(double v) {
  Tensor t = make_tensor({}, false);
  t.d_->value[0] = v;
  return t;
}

std::vector<double>& Tensor::grad() {
  if (d_->grad.size() != d_->value.size()) d_->grad.assign(d_->value.size(), 0.0);
  return d_->grad;
}

void Tensor::zero_grad() {
  if (!d_->grad.empty()) d_->grad.assign(d_->value.size(), 0.0);
}

Tape* Tape::active() { return g_active_tape; }

TapeScope::TapeScope(Tape& tape) : previous_(g_active_tape) { g_active_tape = &tape; }

TapeScope::~TapeScope() { g_active_tape = previous_; }

void Tape::backward(const Tensor& loss) {
  require(loss.defined() && loss.size() == 1, ErrorKind::contract,
          "Tape::backward: loss must be a scalar");
  require(loss.requires_grad(), ErrorKind::contract,
          "Tape::backward: loss was not produced on this tape");
  auto data = loss.ptr();
  data->grad.assign(1, 1.0);
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) (*it)();
  entries_.clear();
}

}  // namespace heasep::nc
