#include "heasep/preprocess.hpp"

#include <cmath>
#include <cstdio>

#include "heasep/error.hpp"

namespace heasep::prep {

int relabel_categorical(int var_index, std::optional<int> raw) {
  require(var_index >= 0 && var_index < psv::kCategoricalVars, ErrorKind::contract,
          "relabel_categorical: var_index out of range");
  if (!raw.has_value()) return kEmptyCategory;
  require(*raw == 0 || *raw == 1, ErrorKind::contract,
          "relabel_categorical: raw value must be 0 or 1");
  return 2 * var_index + *raw;
}

NormStats fit_normalizer(const std::vector<psv::PatientRecord>& train_records) {
  NormStats stats;
  std::array<double, psv::kNumericVars> sum{};
  std::array<std::uint64_t, psv::kNumericVars> count{};

  for (const auto& record : train_records) {
    for (const auto& row : record.rows) {
      for (int j = 0; j < psv::kNumericVars; ++j) {
        if (row.numeric_observed(j)) {
          sum[static_cast<std::size_t>(j)] += row.numeric[static_cast<std::size_t>(j)];
          ++count[static_cast<std::size_t>(j)];
        }
      }
    }
  }
  for (int j = 0; j < psv::kNumericVars; ++j) {
    auto sj = static_cast<std::size_t>(j);
    stats.observed_count[sj] = count[sj];
    stats.mean[sj] = count[sj] ? sum[sj] / static_cast<double>(count[sj]) : 0.0;
  }

  // Second pass for the centered moment; stable for wildly scaled variables.
  std::array<double, psv::kNumericVars> sq{};
  for (const auto& record : train_records) {
    for (const auto& row : record.rows) {
      for (int j = 0; j < psv::kNumericVars; ++j) {
        if (row.numeric_observed(j)) {
          auto sj = static_cast<std::size_t>(j);
          const double d = row.numeric[sj] - stats.mean[sj];
          sq[sj] += d * d;
        }
      }
    }
  }
  for (int j = 0; j < psv::kNumericVars; ++j) {
    auto sj = static_cast<std::size_t>(j);
    if (count[sj] == 0) {
      std::fprintf(stderr, "heasep: warning: variable %s has no observed training values\n",
                   std::string(psv::numeric_names()[sj]).c_str());
      stats.mean[sj] = 0.0;
      stats.stddev[sj] = 1.0;
      continue;
    }
    double sd = std::sqrt(sq[sj] / static_cast<double>(count[sj]));
    stats.stddev[sj] = sd < kStdFloor ? kStdFloor : sd;
  }
  return stats;
}

void apply_normalizer_in_place(psv::PatientRecord& record, const NormStats& stats) {
  for (auto& row : record.rows) {
    for (int j = 0; j < psv::kNumericVars; ++j) {
      if (row.numeric_observed(j)) {
        auto sj = static_cast<std::size_t>(j);
        row.numeric[sj] = (row.numeric[sj] - stats.mean[sj]) / stats.stddev[sj];
      }
    }
  }
}

psv::PatientRecord apply_normalizer(const psv::PatientRecord& record, const NormStats& stats) {
  psv::PatientRecord out = record;
  apply_normalizer_in_place(out, stats);
  return out;
}

WindowSample build_window(const psv::PatientRecord& record, int t_end, int window_hours) {
  require(window_hours >= 1, ErrorKind::contract, "build_window: window_hours must be >= 1");
  require(t_end >= 0 && static_cast<std::size_t>(t_end) < record.n_hours(), ErrorKind::contract,
          "build_window: t_end out of range");

  const int L = window_hours;
  WindowSample w;
  w.window_hours = L;
  w.values.assign(static_cast<std::size_t>(L) * psv::kNumericVars, 0.0);
  w.obs_mask.assign(static_cast<std::size_t>(L) * psv::kNumericVars, 0);
  w.cat_idx.assign(static_cast<std::size_t>(L) * psv::kCategoricalVars,
                   static_cast<std::int8_t>(kEmptyCategory));
  w.pad_mask.assign(static_cast<std::size_t>(L), 0);
  w.patient_id = record.patient_id;
  w.t_end = t_end;
  w.label = record.rows[static_cast<std::size_t>(t_end)].label;

  for (int i = 0; i < L; ++i) {
    const int t = t_end - (L - 1) + i;
    if (t < 0) {
      w.pad_mask[static_cast<std::size_t>(i)] = 1;
      continue;
    }
    const auto& row = record.rows[static_cast<std::size_t>(t)];
    for (int j = 0; j < psv::kNumericVars; ++j) {
      if (row.numeric_observed(j)) {
        auto idx = static_cast<std::size_t>(i) * psv::kNumericVars + static_cast<std::size_t>(j);
        w.values[idx] = row.numeric[static_cast<std::size_t>(j)];
        w.obs_mask[idx] = 1;
      }
    }
    for (int c = 0; c < psv::kCategoricalVars; ++c) {
      std::optional<int> raw;
      if (row.categorical_observed(c)) raw = row.categorical[static_cast<std::size_t>(c)];
      w.cat_idx[static_cast<std::size_t>(i) * psv::kCategoricalVars + static_cast<std::size_t>(c)] =
          static_cast<std::int8_t>(relabel_categorical(c, raw));
    }
  }
  return w;
}

std::vector<WindowSample> make_windows(const psv::PatientRecord& record, int window_hours) {
  std::vector<WindowSample> windows;
  windows.reserve(record.n_hours());
  for (int t = 0; t < static_cast<int>(record.n_hours()); ++t) {
    windows.push_back(build_window(record, t, window_hours));
  }
  return windows;
}

}  // namespace heasep::prep
