#ifndef HEASEP_TESTS_RANK_METRIC_ORACLES_HPP
#define HEASEP_TESTS_RANK_METRIC_ORACLES_HPP

// Brute-force oracles for the ranking metrics, independent of src/.

#include <algorithm>
#include <cstddef>
#include <vector>

namespace oracle {

// AUROC by exhaustive pair counting: P(s_pos > s_neg) + 0.5 * P(tie).
inline double auroc_pairs(const std::vector<double>& scores,
                          const std::vector<int>& labels) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / static_cast<double>(pairs);
}

// Average precision by a naive sweep over the unique scores, recounting the
// confusion table from scratch at every threshold.
inline double auprc_sweep(const std::vector<double>& scores,
                          const std::vector<int>& labels) {
  std::vector<double> thresholds(scores);
  std::sort(thresholds.begin(), thresholds.end(), std::greater<double>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  std::size_t n_pos = 0;
  for (int y : labels) n_pos += (y == 1);

  double ap = 0.0;
  double prev_recall = 0.0;
  for (double th : thresholds) {
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] >= th) {
        if (labels[i] == 1) ++tp;
        else ++fp;
      }
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return ap;
}

}  // namespace oracle

#endif
