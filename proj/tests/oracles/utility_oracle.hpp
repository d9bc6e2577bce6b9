#ifndef HEASEP_TESTS_UTILITY_ORACLE_HPP
#define HEASEP_TESTS_UTILITY_ORACLE_HPP

// Straight-line oracle for the CinC2019 utility score, written directly from
// the piecewise definition and kept independent of src/. The production
// implementation is checked against this file; do not share code between them.

#include <cstddef>
#include <limits>
#include <vector>

namespace oracle {

struct UtilityParams {
  double dt_early = -12.0;
  double dt_optimal = -6.0;
  double dt_late = 3.0;
  double max_u_tp = 1.0;
  double min_u_fn = -2.0;
  double u_fp = -0.05;
  double u_tn = 0.0;
};

// Unnormalized utility of one patient's hourly binary predictions.
inline double patient_utility(const std::vector<int>& labels,
                              const std::vector<int>& predictions,
                              const UtilityParams& p = UtilityParams{}) {
  bool is_septic = false;
  double t_sepsis = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (labels[t] == 1) {
      is_septic = true;
      t_sepsis = static_cast<double>(t) - p.dt_optimal;
      break;
    }
  }

  const double m1 = p.max_u_tp / (p.dt_optimal - p.dt_early);
  const double b1 = -m1 * p.dt_early;
  const double m2 = -p.max_u_tp / (p.dt_late - p.dt_optimal);
  const double b2 = -m2 * p.dt_late;
  const double m3 = p.min_u_fn / (p.dt_late - p.dt_optimal);
  const double b3 = -m3 * p.dt_optimal;

  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double t = static_cast<double>(i);
    if (t > t_sepsis + p.dt_late) continue;
    if (is_septic && predictions[i] == 1) {
      if (t <= t_sepsis + p.dt_optimal) {
        double u = m1 * (t - t_sepsis) + b1;
        total += (u > p.u_fp) ? u : p.u_fp;
      } else {
        total += m2 * (t - t_sepsis) + b2;
      }
    } else if (is_septic && predictions[i] == 0) {
      if (t <= t_sepsis + p.dt_optimal) {
        total += 0.0;
      } else {
        total += m3 * (t - t_sepsis) + b3;
      }
    } else if (!is_septic && predictions[i] == 1) {
      total += p.u_fp;
    } else {
      total += p.u_tn;
    }
  }
  return total;
}

// The optimal prediction sequence: 1 exactly on hours within
// [t_sepsis + dt_early, t_sepsis + dt_late] for septic patients, all 0
// otherwise.
inline std::vector<int> optimal_predictions(const std::vector<int>& labels,
                                            const UtilityParams& p = UtilityParams{}) {
  std::vector<int> best(labels.size(), 0);
  std::size_t first = labels.size();
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (labels[t] == 1) {
      first = t;
      break;
    }
  }
  if (first == labels.size()) return best;
  const double t_sepsis = static_cast<double>(first) - p.dt_optimal;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double t = static_cast<double>(i);
    if (t >= t_sepsis + p.dt_early && t <= t_sepsis + p.dt_late) best[i] = 1;
  }
  return best;
}

// Normalized cohort utility: (observed - inaction) / (optimal - inaction).
// Returns false when the cohort is degenerate (optimal == inaction).
inline bool utility_normalized(const std::vector<std::vector<int>>& labels,
                               const std::vector<std::vector<int>>& predictions,
                               double* out,
                               const UtilityParams& p = UtilityParams{}) {
  double observed = 0.0, inaction = 0.0, optimal = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    observed += patient_utility(labels[i], predictions[i], p);
    inaction += patient_utility(labels[i], std::vector<int>(labels[i].size(), 0), p);
    optimal += patient_utility(labels[i], optimal_predictions(labels[i], p), p);
  }
  if (optimal == inaction) return false;
  *out = (observed - inaction) / (optimal - inaction);
  return true;
}

}  // namespace oracle

#endif
