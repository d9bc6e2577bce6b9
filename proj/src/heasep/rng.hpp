#ifndef HEASEP_RNG_HPP
#define HEASEP_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace heasep {

// Deterministic RNG. mt19937_64 output is fully specified by the standard;
// the distributions below are hand-rolled so that streams are reproducible
// across standard library implementations, not just across runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // [0, 1)
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // [0, n)
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform01() * static_cast<double>(n));
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Box-Muller, one value per call.
  double normal(double mean, double stddev) {
    double u1 = uniform01();
    double u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    return mean + stddev * z;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace heasep

#endif
