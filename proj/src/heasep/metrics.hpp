#ifndef HEASEP_METRICS_HPP
#define HEASEP_METRICS_HPP

#include <span>
#include <string>
#include <vector>

namespace heasep::metrics {

// Constants of the CinC2019 utility score. Times are hours relative to
// t_sepsis; rewards are per prediction-hour.
struct UtilityConstants {
  double dt_early = -12.0;
  double dt_optimal = -6.0;
  double dt_late = 3.0;
  double max_u_tp = 1.0;
  double min_u_fn = -2.0;
  double u_fp = -0.05;
  double u_tn = 0.0;
};

struct PatientPrediction {
  std::string patient_id;
  std::vector<double> probs;
  std::vector<int> predictions;  // binary, prob >= threshold
  std::vector<int> labels;
};

// Rank formulation: P(score_pos > score_neg) + 0.5 P(tie) over all
// positive/negative pairs. Both classes must be present.
double auroc(std::span<const double> scores, std::span<const int> labels);

// Average precision with step interpolation over the unique-score sweep.
// At least one positive required.
double auprc(std::span<const double> scores, std::span<const int> labels);

// Unnormalized utility of one patient's hourly binary predictions.
// t_sepsis is reconstructed as (first labeled hour) - dt_optimal.
double patient_utility(std::span<const int> labels, std::span<const int> predictions,
                       const UtilityConstants& c = UtilityConstants{});

// 1 exactly on hours in [t_sepsis + dt_early, t_sepsis + dt_late] for a
// septic patient, all zero otherwise.
std::vector<int> optimal_policy(std::span<const int> labels,
                                const UtilityConstants& c = UtilityConstants{});

// (U_observed - U_inaction) / (U_optimal - U_inaction), sums over patients.
// Degenerate cohorts (optimal == inaction) raise ErrorKind::contract.
double utility_normalized(std::span<const PatientPrediction> cohort,
                          const UtilityConstants& c = UtilityConstants{});

// Sweeps candidate thresholds (the sorted unique probabilities, quantile-
// subsampled above max_candidates) and returns the lowest maximizer of the
// normalized cohort utility. Predictions in the cohort are ignored; labels
// and probs are used.
double select_threshold(std::span<const PatientPrediction> cohort,
                        const UtilityConstants& c = UtilityConstants{},
                        std::size_t max_candidates = 512);

enum class EnsembleMode { average, major_vote, any_vote };
EnsembleMode ensemble_mode_from_string(const std::string& s);
std::string to_string(EnsembleMode mode);

// Combines K folds' probabilities for one hour series into binary
// predictions: average = mean prob thresholded; major_vote = 1 iff more
// than K/2 per-fold votes; any_vote = 1 iff any fold votes.
std::vector<int> ensemble(const std::vector<std::vector<double>>& fold_probs,
                          EnsembleMode mode, double threshold);

struct FoldScores {
  double auroc = 0.0;
  double auprc = 0.0;
  double utility = 0.0;
  double threshold = 0.0;
};

struct ScoreReport {
  double auroc = 0.0;
  double auprc = 0.0;
  double utility_normalized = 0.0;
  double threshold = 0.0;
  std::vector<FoldScores> folds;  // empty outside cross-validation
  bool has_ensemble = false;
  double utility_average_vote = 0.0;
  double utility_major_vote = 0.0;
  double utility_any_vote = 0.0;
};

std::string report_text(const ScoreReport& report);
std::string report_kv(const ScoreReport& report);

}  // namespace heasep::metrics

#endif
