#ifndef HEASEP_PREPROCESS_HPP
#define HEASEP_PREPROCESS_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "heasep/psv.hpp"

namespace heasep::prep {

inline constexpr double kStdFloor = 1e-6;
inline constexpr int kEmptyCategory = 6;  // relabel target for a missing categorical

// Per-variable z-score statistics, fitted on training rows only, over
// observed values only. Population (divide-by-n) convention, std floored
// at kStdFloor. A variable with zero observations gets mean 0, std 1.
struct NormStats {
  std::array<double, psv::kNumericVars> mean{};
  std::array<double, psv::kNumericVars> stddev{};
  std::array<std::uint64_t, psv::kNumericVars> observed_count{};
};

// Fixed-length window ending at hour t_end. Rows before hour 0 are padding:
// fully unobserved, all categorical indices = kEmptyCategory.
struct WindowSample {
  int window_hours = 0;  // L
  std::vector<double> values;        // L x 37, normalized, 0 where unobserved
  std::vector<std::uint8_t> obs_mask;  // L x 37
  std::vector<std::int8_t> cat_idx;  // L x 3, each in [0, 6]
  std::vector<std::uint8_t> pad_mask;  // L, 1 = zero-filled padding row
  int label = 0;
  std::string patient_id;
  int t_end = 0;

  double value(int t, int j) const {
    return values[static_cast<std::size_t>(t) * psv::kNumericVars + static_cast<std::size_t>(j)];
  }
  bool observed(int t, int j) const {
    return obs_mask[static_cast<std::size_t>(t) * psv::kNumericVars + static_cast<std::size_t>(j)] != 0;
  }
  int category(int t, int c) const {
    return cat_idx[static_cast<std::size_t>(t) * psv::kCategoricalVars + static_cast<std::size_t>(c)];
  }
};

// Maps one categorical variable's raw value into [0, 6]:
// 2 * var_index + raw when present, kEmptyCategory when missing.
int relabel_categorical(int var_index, std::optional<int> raw);

NormStats fit_normalizer(const std::vector<psv::PatientRecord>& train_records);

psv::PatientRecord apply_normalizer(const psv::PatientRecord& record, const NormStats& stats);
void apply_normalizer_in_place(psv::PatientRecord& record, const NormStats& stats);

// Window ending at hour t_end of a (normalized) record.
WindowSample build_window(const psv::PatientRecord& record, int t_end, int window_hours);

// One window per hour of the record.
std::vector<WindowSample> make_windows(const psv::PatientRecord& record, int window_hours);

}  // namespace heasep::prep

#endif
