#ifndef HEASEP_GRADSUITE_HPP
#define HEASEP_GRADSUITE_HPP

#include <cstdint>
#include <functional>
#include <string>

#include "heasep/gradcheck.hpp"
#include "heasep/preprocess.hpp"
#include "heasep/rng.hpp"

namespace heasep::harness {

struct GradSuiteResult {
  double max_primitive_error = 0.0;
  double max_model_error = 0.0;
  bool finite = true;
};

// Random but structurally valid window: a padded prefix, Bernoulli
// missingness, standard-normal values, uniform categorical indices.
prep::WindowSample random_window(int window_hours, Rng& rng, double obs_prob = 0.5);

// Per-primitive central-difference checks (trials each, random small
// shapes) followed by end-to-end checks of the full loss on random windows
// (1-head and 8-head aggregation models plus the dense-embedding
// baseline). on_row, when set, receives one line per check.
GradSuiteResult run_gradcheck_suite(
    int primitive_trials, std::uint64_t seed,
    const std::function<void(const std::string&, double)>& on_row = {});

}  // namespace heasep::harness

#endif
