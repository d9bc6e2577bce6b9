#include "heasep/params.hpp"

#include <cmath>

namespace heasep::nc {

void init_uniform(Tensor& t, Rng& rng) {
  const int fan_in = t.rank() == 2 ? t.cols() : t.rows();
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = rng.uniform(-bound, bound);
}

Tensor ParamStore::create(const std::string& name, std::vector<int> shape, Rng& rng) {
  Tensor t = Tensor::zeros(std::move(shape), true);
  init_uniform(t, rng);
  put(name, t);
  return t;
}

Tensor ParamStore::create_zero(const std::string& name, std::vector<int> shape) {
  Tensor t = Tensor::zeros(std::move(shape), true);
  put(name, t);
  return t;
}

void ParamStore::put(const std::string& name, Tensor t) {
  require(!contains(name), ErrorKind::contract, "ParamStore: duplicate parameter " + name);
  t.set_requires_grad(true);
  entries_.emplace_back(name, std::move(t));
}

Tensor ParamStore::get(const std::string& name) const {
  for (const auto& [n, t] : entries_)
    if (n == name) return t;
  raise(ErrorKind::contract, "ParamStore: unknown parameter " + name);
}

bool ParamStore::contains(const std::string& name) const {
  for (const auto& [n, t] : entries_)
    if (n == name) return true;
  return false;
}

std::vector<Tensor> ParamStore::tensors() const {
  std::vector<Tensor> out;
  out.reserve(entries_.size());
  for (const auto& [n, t] : entries_) out.push_back(t);
  return out;
}

void ParamStore::zero_grads() {
  for (auto& [n, t] : entries_) t.zero_grad();
}

void ParamStore::round_to_f32() {
  for (auto& [n, t] : entries_)
    for (std::size_t i = 0; i < t.size(); ++i)
      t.data()[i] = static_cast<double>(static_cast<float>(t.data()[i]));
}

}  // namespace heasep::nc
