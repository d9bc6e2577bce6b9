#include "heasep/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "heasep/error.hpp"

namespace heasep::metrics {

double auroc(std::span<const double> scores, std::span<const int> labels) {
  require(scores.size() == labels.size(), ErrorKind::contract, "auroc: length mismatch");
  std::size_t n_pos = 0, n_neg = 0;
  for (int y : labels) (y == 1 ? n_pos : n_neg) += 1;
  require(n_pos > 0 && n_neg > 0, ErrorKind::contract,
          "auroc: both classes must be present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double wins = 0.0;
  std::size_t neg_below = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    std::size_t pos_tied = 0, neg_tied = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] == 1 ? pos_tied : neg_tied) += 1;
      ++j;
    }
    wins += static_cast<double>(pos_tied) * static_cast<double>(neg_below) +
            0.5 * static_cast<double>(pos_tied) * static_cast<double>(neg_tied);
    neg_below += neg_tied;
    i = j;
  }
  return wins / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double auprc(std::span<const double> scores, std::span<const int> labels) {
  require(scores.size() == labels.size(), ErrorKind::contract, "auprc: length mismatch");
  std::size_t n_pos = 0;
  for (int y : labels) n_pos += (y == 1);
  require(n_pos > 0, ErrorKind::contract, "auprc: at least one positive required");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  double ap = 0.0;
  double prev_recall = 0.0;
  std::size_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] == 1 ? tp : fp) += 1;
      ++j;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return ap;
}

double patient_utility(std::span<const int> labels, std::span<const int> predictions,
                       const UtilityConstants& c) {
  require(labels.size() == predictions.size(), ErrorKind::contract,
          "patient_utility: length mismatch");

  bool is_septic = false;
  double t_sepsis = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (labels[t] == 1) {
      is_septic = true;
      t_sepsis = static_cast<double>(t) - c.dt_optimal;
      break;
    }
  }

  const double m1 = c.max_u_tp / (c.dt_optimal - c.dt_early);
  const double b1 = -m1 * c.dt_early;
  const double m2 = -c.max_u_tp / (c.dt_late - c.dt_optimal);
  const double b2 = -m2 * c.dt_late;
  const double m3 = c.min_u_fn / (c.dt_late - c.dt_optimal);
  const double b3 = -m3 * c.dt_optimal;

  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double t = static_cast<double>(i);
    if (t > t_sepsis + c.dt_late) continue;
    if (is_septic) {
      if (predictions[i] == 1) {
        if (t <= t_sepsis + c.dt_optimal)
          total += std::max(m1 * (t - t_sepsis) + b1, c.u_fp);
        else
          total += m2 * (t - t_sepsis) + b2;
      } else {
        if (t > t_sepsis + c.dt_optimal) total += m3 * (t - t_sepsis) + b3;
      }
    } else {
      total += predictions[i] == 1 ? c.u_fp : c.u_tn;
    }
  }
  return total;
}

std::vector<int> optimal_policy(std::span<const int> labels, const UtilityConstants& c) {
  std::vector<int> best(labels.size(), 0);
  std::size_t first = labels.size();
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (labels[t] == 1) {
      first = t;
      break;
    }
  }
  if (first == labels.size()) return best;
  const double t_sepsis = static_cast<double>(first) - c.dt_optimal;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double t = static_cast<double>(i);
    if (t >= t_sepsis + c.dt_early && t <= t_sepsis + c.dt_late) best[i] = 1;
  }
  return best;
}

namespace {

struct CohortBaseline {
  double inaction = 0.0;
  double optimal = 0.0;
};

CohortBaseline cohort_baseline(std::span<const PatientPrediction> cohort,
                               const UtilityConstants& c) {
  CohortBaseline b;
  for (const auto& p : cohort) {
    const std::vector<int> zeros(p.labels.size(), 0);
    b.inaction += patient_utility(p.labels, zeros, c);
    b.optimal += patient_utility(p.labels, optimal_policy(p.labels, c), c);
  }
  return b;
}

}  // namespace

double utility_normalized(std::span<const PatientPrediction> cohort,
                          const UtilityConstants& c) {
  require(!cohort.empty(), ErrorKind::contract, "utility_normalized: empty cohort");
  const CohortBaseline base = cohort_baseline(cohort, c);
  require(base.optimal != base.inaction, ErrorKind::contract,
          "utility_normalized: degenerate cohort (optimal utility equals inaction)");
  double observed = 0.0;
  for (const auto& p : cohort) observed += patient_utility(p.labels, p.predictions, c);
  return (observed - base.inaction) / (base.optimal - base.inaction);
}

double select_threshold(std::span<const PatientPrediction> cohort, const UtilityConstants& c,
                        std::size_t max_candidates) {
  require(!cohort.empty(), ErrorKind::contract, "select_threshold: empty cohort");

  std::vector<double> candidates;
  for (const auto& p : cohort) candidates.insert(candidates.end(), p.probs.begin(), p.probs.end());
  require(!candidates.empty(), ErrorKind::contract, "select_threshold: no probabilities");
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  if (max_candidates >= 2 && candidates.size() > max_candidates) {
    // quantile subsample, endpoints kept
    std::vector<double> picked;
    picked.reserve(max_candidates);
    for (std::size_t i = 0; i < max_candidates; ++i) {
      std::size_t idx = i * (candidates.size() - 1) / (max_candidates - 1);
      picked.push_back(candidates[idx]);
    }
    picked.erase(std::unique(picked.begin(), picked.end()), picked.end());
    candidates = std::move(picked);
  }

  const CohortBaseline base = cohort_baseline(cohort, c);
  require(base.optimal != base.inaction, ErrorKind::contract,
          "select_threshold: degenerate cohort");

  double best_threshold = candidates.front();
  double best_utility = -std::numeric_limits<double>::infinity();
  std::vector<int> preds;
  for (double th : candidates) {
    double observed = 0.0;
    for (const auto& p : cohort) {
      preds.assign(p.probs.size(), 0);
      for (std::size_t i = 0; i < p.probs.size(); ++i) preds[i] = p.probs[i] >= th ? 1 : 0;
      observed += patient_utility(p.labels, preds, c);
    }
    const double utility = (observed - base.inaction) / (base.optimal - base.inaction);
    if (utility > best_utility) {
      best_utility = utility;
      best_threshold = th;
    }
  }
  return best_threshold;
}

EnsembleMode ensemble_mode_from_string(const std::string& s) {
  if (s == "average") return EnsembleMode::average;
  if (s == "major_vote") return EnsembleMode::major_vote;
  if (s == "any_vote") return EnsembleMode::any_vote;
  raise(ErrorKind::contract, "unknown ensemble mode '" + s + "'");
}

std::string to_string(EnsembleMode mode) {
  switch (mode) {
    case EnsembleMode::average: return "average";
    case EnsembleMode::major_vote: return "major_vote";
    case EnsembleMode::any_vote: return "any_vote";
  }
  raise(ErrorKind::internal, "unknown ensemble mode");
}

std::vector<int> ensemble(const std::vector<std::vector<double>>& fold_probs,
                          EnsembleMode mode, double threshold) {
  require(!fold_probs.empty(), ErrorKind::contract, "ensemble: no folds");
  const std::size_t n = fold_probs.front().size();
  for (const auto& probs : fold_probs)
    require(probs.size() == n, ErrorKind::contract, "ensemble: fold lengths differ");
  const std::size_t k = fold_probs.size();

  std::vector<int> out(n, 0);
  switch (mode) {
    case EnsembleMode::average:
      for (std::size_t i = 0; i < n; ++i) {
        double mean = 0.0;
        for (const auto& probs : fold_probs) mean += probs[i];
        mean /= static_cast<double>(k);
        out[i] = mean >= threshold ? 1 : 0;
      }
      break;
    case EnsembleMode::major_vote:
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t votes = 0;
        for (const auto& probs : fold_probs) votes += probs[i] >= threshold ? 1 : 0;
        out[i] = 2 * votes > k ? 1 : 0;
      }
      break;
    case EnsembleMode::any_vote:
      for (std::size_t i = 0; i < n; ++i) {
        for (const auto& probs : fold_probs)
          if (probs[i] >= threshold) {
            out[i] = 1;
            break;
          }
      }
      break;
  }
  return out;
}

namespace {

std::string fmt(double v, const char* spec = "%.6f") {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

std::string report_text(const ScoreReport& r) {
  std::string out;
  out += "AUROC:              " + fmt(r.auroc) + "\n";
  out += "AUPRC:              " + fmt(r.auprc) + "\n";
  out += "Normalized utility: " + fmt(r.utility_normalized) + "\n";
  out += "Threshold:          " + fmt(r.threshold) + "\n";
  if (!r.folds.empty()) {
    out += "\nPer-fold validation:\n";
    for (std::size_t i = 0; i < r.folds.size(); ++i) {
      const auto& f = r.folds[i];
      out += "  fold " + std::to_string(i) + ": auroc=" + fmt(f.auroc) +
             " auprc=" + fmt(f.auprc) + " utility=" + fmt(f.utility) +
             " threshold=" + fmt(f.threshold) + "\n";
    }
  }
  if (r.has_ensemble) {
    out += "\nEnsemble utility (held set):\n";
    out += "  average:    " + fmt(r.utility_average_vote) + "\n";
    out += "  major vote: " + fmt(r.utility_major_vote) + "\n";
    out += "  any vote:   " + fmt(r.utility_any_vote) + "\n";
  }
  return out;
}

std::string report_kv(const ScoreReport& r) {
  std::string out;
  out += "auroc=" + fmt(r.auroc, "%.17g") + "\n";
  out += "auprc=" + fmt(r.auprc, "%.17g") + "\n";
  out += "utility_normalized=" + fmt(r.utility_normalized, "%.17g") + "\n";
  out += "threshold=" + fmt(r.threshold, "%.17g") + "\n";
  for (std::size_t i = 0; i < r.folds.size(); ++i) {
    const auto& f = r.folds[i];
    const std::string p = "fold." + std::to_string(i) + ".";
    out += p + "auroc=" + fmt(f.auroc, "%.17g") + "\n";
    out += p + "auprc=" + fmt(f.auprc, "%.17g") + "\n";
    out += p + "utility=" + fmt(f.utility, "%.17g") + "\n";
    out += p + "threshold=" + fmt(f.threshold, "%.17g") + "\n";
  }
  if (r.has_ensemble) {
    out += "ensemble.average=" + fmt(r.utility_average_vote, "%.17g") + "\n";
    out += "ensemble.major_vote=" + fmt(r.utility_major_vote, "%.17g") + "\n";
    out += "ensemble.any_vote=" + fmt(r.utility_any_vote, "%.17g") + "\n";
  }
  return out;
}

}  // namespace heasep::metrics
