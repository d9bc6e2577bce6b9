#ifndef HEASEP_PSV_HPP
#define HEASEP_PSV_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace heasep::psv {

inline constexpr int kNumericVars = 37;
inline constexpr int kCategoricalVars = 3;
inline constexpr int kTotalVars = kNumericVars + kCategoricalVars;

// Canonical numeric variable order: 8 vitals, 26 labs, Age, HospAdmTime,
// ICULOS. Categorical order: Gender, Unit1, Unit2.
const std::array<std::string_view, kNumericVars>& numeric_names();
const std::array<std::string_view, kCategoricalVars>& categorical_names();
std::string_view label_name();  // "SepsisLabel"

// One hour of one patient. Values are stored only where observed; the
// missingness bits are the source of truth.
struct HourRow {
  std::array<double, kNumericVars> numeric{};    // valid only where observed
  std::array<std::int8_t, kCategoricalVars> categorical{-1, -1, -1};  // -1 = missing
  std::uint64_t observed_bits = 0;
  std::uint8_t label = 0;

  bool numeric_observed(int j) const { return (observed_bits >> j) & 1u; }
  std::optional<double> numeric_value(int j) const {
    if (!numeric_observed(j)) return std::nullopt;
    return numeric[static_cast<std::size_t>(j)];
  }
  void set_numeric(int j, double v) {
    numeric[static_cast<std::size_t>(j)] = v;
    observed_bits |= (std::uint64_t{1} << j);
  }
  bool categorical_observed(int c) const { return categorical[static_cast<std::size_t>(c)] >= 0; }
};

struct PatientRecord {
  std::string patient_id;
  std::vector<HourRow> rows;

  std::size_t n_hours() const { return rows.size(); }
  bool is_septic() const {
    for (const auto& r : rows)
      if (r.label) return true;
    return false;
  }
};

struct DatasetSummary {
  std::size_t n_patients = 0;
  std::size_t n_septic = 0;
  std::size_t n_rows = 0;
  double positive_row_fraction = 0.0;
};

// Parses one challenge-format .psv file. Columns are bound by header name,
// not position; the literal token "NaN" marks a missing value. Throws
// ErrorKind::parse / ErrorKind::schema with the offending line number.
PatientRecord parse_patient_file(std::string_view text, std::string patient_id = "");

// Serializes a record back to .psv, canonical column order, exact value
// round-trip.
std::string write_patient_file(const PatientRecord& record);

DatasetSummary summarize(const std::vector<PatientRecord>& records);

// Loads every *.psv in a directory, sorted by patient id (= filename stem).
std::vector<PatientRecord> load_directory(const std::string& dir);

// Challenge prediction output: header "PredictedProbability|PredictedLabel",
// one line per hour, probability with 4 decimal digits.
std::string write_prediction_file(const std::vector<double>& probs,
                                  const std::vector<int>& labels);

struct PredictionFile {
  std::vector<double> probs;
  std::vector<int> labels;
};
PredictionFile parse_prediction_file(std::string_view text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace heasep::psv

#endif
