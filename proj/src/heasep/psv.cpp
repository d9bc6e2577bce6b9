#include "heasep/psv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "heasep/error.hpp"

namespace heasep::psv {

namespace fs = std::filesystem;

const std::array<std::string_view, kNumericVars>& numeric_names() {
  static const std::array<std::string_view, kNumericVars> names = {
      "HR", "O2Sat", "Temp", "SBP", "MAP", "DBP", "Resp", "EtCO2",
      "BaseExcess", "HCO3", "FiO2", "pH", "PaCO2", "SaO2", "AST", "BUN",
      "Alkalinephos", "Calcium", "Chloride", "Creatinine", "Bilirubin_direct",
      "Glucose", "Lactate", "Magnesium", "Phosphate", "Potassium",
      "Bilirubin_total", "TroponinI", "Hct", "Hgb", "PTT", "WBC",
      "Fibrinogen", "Platelets", "Age", "HospAdmTime", "ICULOS"};
  return names;
}

const std::array<std::string_view, kCategoricalVars>& categorical_names() {
  static const std::array<std::string_view, kCategoricalVars> names = {
      "Gender", "Unit1", "Unit2"};
  return names;
}

std::string_view label_name() { return "SepsisLabel"; }

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find('|', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

bool is_nan_token(std::string_view tok) { return tok == "NaN"; }

double parse_double_token(std::string_view tok, std::size_t line_no,
                          std::string_view column) {
  double value = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    raise(ErrorKind::parse, "line " + std::to_string(line_no) +
                                ": non-numeric token '" + std::string(tok) +
                                "' in column " + std::string(column));
  }
  if (!std::isfinite(value)) {
    raise(ErrorKind::parse, "line " + std::to_string(line_no) +
                                ": non-finite value in column " + std::string(column));
  }
  return value;
}

}  // namespace

PatientRecord parse_patient_file(std::string_view text, std::string patient_id) {
  PatientRecord record;
  record.patient_id = std::move(patient_id);

  std::size_t offset = 0;
  std::size_t line_no = 0;

  auto next_line = [&](std::string_view& out) -> bool {
    if (offset >= text.size()) return false;
    std::size_t end = text.find('\n', offset);
    if (end == std::string_view::npos) end = text.size();
    out = text.substr(offset, end - offset);
    if (!out.empty() && out.back() == '\r') out.remove_suffix(1);
    offset = end + 1;
    ++line_no;
    return true;
  };

  std::string_view header;
  if (!next_line(header) || header.empty()) {
    raise(ErrorKind::schema, "empty file: no header line");
  }
  const auto header_fields = split_fields(header);

  // Bind columns by name. Every canonical column plus the label must be
  // present exactly once; anything else is a schema error.
  // slot: 0..36 numeric, 37..39 categorical, 40 label.
  std::vector<int> column_slot(header_fields.size(), -1);
  std::vector<bool> seen(kTotalVars + 1, false);
  for (std::size_t c = 0; c < header_fields.size(); ++c) {
    std::string_view name = header_fields[c];
    int slot = -1;
    for (int j = 0; j < kNumericVars; ++j)
      if (name == numeric_names()[static_cast<std::size_t>(j)]) slot = j;
    for (int k = 0; k < kCategoricalVars; ++k)
      if (name == categorical_names()[static_cast<std::size_t>(k)]) slot = kNumericVars + k;
    if (name == label_name()) slot = kTotalVars;
    if (slot < 0) {
      raise(ErrorKind::schema, "unknown column '" + std::string(name) + "' in header");
    }
    if (seen[static_cast<std::size_t>(slot)]) {
      raise(ErrorKind::schema, "duplicate column '" + std::string(name) + "' in header");
    }
    seen[static_cast<std::size_t>(slot)] = true;
    column_slot[c] = slot;
  }
  if (!seen[kTotalVars]) {
    raise(ErrorKind::schema, "missing label column '" + std::string(label_name()) + "'");
  }
  for (int j = 0; j < kTotalVars; ++j) {
    if (!seen[static_cast<std::size_t>(j)]) {
      std::string_view name = j < kNumericVars
                                  ? numeric_names()[static_cast<std::size_t>(j)]
                                  : categorical_names()[static_cast<std::size_t>(j - kNumericVars)];
      raise(ErrorKind::schema, "missing column '" + std::string(name) + "'");
    }
  }

  std::string_view line;
  while (next_line(line)) {
    if (line.empty() && offset >= text.size()) break;  // trailing newline
    const auto fields = split_fields(line);
    if (fields.size() != header_fields.size()) {
      raise(ErrorKind::parse, "line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(header_fields.size()) + " fields, got " +
                                  std::to_string(fields.size()));
    }
    HourRow row;
    bool label_set = false;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const int slot = column_slot[c];
      std::string_view tok = fields[c];
      if (slot < kNumericVars) {
        if (is_nan_token(tok)) continue;
        row.set_numeric(slot, parse_double_token(tok, line_no, header_fields[c]));
      } else if (slot < kTotalVars) {
        if (is_nan_token(tok)) continue;
        double v = parse_double_token(tok, line_no, header_fields[c]);
        if (v != 0.0 && v != 1.0) {
          raise(ErrorKind::parse, "line " + std::to_string(line_no) +
                                      ": categorical value must be 0 or 1, got '" +
                                      std::string(tok) + "'");
        }
        row.categorical[static_cast<std::size_t>(slot - kNumericVars)] =
            static_cast<std::int8_t>(v);
      } else {
        if (is_nan_token(tok)) {
          raise(ErrorKind::parse, "line " + std::to_string(line_no) + ": missing label");
        }
        double v = parse_double_token(tok, line_no, header_fields[c]);
        if (v != 0.0 && v != 1.0) {
          raise(ErrorKind::parse, "line " + std::to_string(line_no) +
                                      ": label must be 0 or 1");
        }
        row.label = static_cast<std::uint8_t>(v);
        label_set = true;
      }
    }
    if (!label_set) raise(ErrorKind::internal, "label column lost during parse");
    record.rows.push_back(row);
  }
  return record;
}

namespace {

void append_double(std::string& out, double v) {
  char buf[40];
  int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  out.append(buf, static_cast<std::size_t>(n));
}

}  // namespace

std::string write_patient_file(const PatientRecord& record) {
  std::string out;
  for (int j = 0; j < kNumericVars; ++j) {
    out += numeric_names()[static_cast<std::size_t>(j)];
    out += '|';
  }
  for (int k = 0; k < kCategoricalVars; ++k) {
    out += categorical_names()[static_cast<std::size_t>(k)];
    out += '|';
  }
  out += label_name();
  out += '\n';
  for (const auto& row : record.rows) {
    for (int j = 0; j < kNumericVars; ++j) {
      if (row.numeric_observed(j)) append_double(out, row.numeric[static_cast<std::size_t>(j)]);
      else out += "NaN";
      out += '|';
    }
    for (int k = 0; k < kCategoricalVars; ++k) {
      if (row.categorical_observed(k))
        out += std::to_string(static_cast<int>(row.categorical[static_cast<std::size_t>(k)]));
      else
        out += "NaN";
      out += '|';
    }
    out += std::to_string(static_cast<int>(row.label));
    out += '\n';
  }
  return out;
}

DatasetSummary summarize(const std::vector<PatientRecord>& records) {
  DatasetSummary s;
  std::size_t positive_rows = 0;
  s.n_patients = records.size();
  for (const auto& r : records) {
    s.n_rows += r.n_hours();
    if (r.is_septic()) ++s.n_septic;
    for (const auto& row : r.rows) positive_rows += row.label;
  }
  s.positive_row_fraction =
      s.n_rows == 0 ? 0.0 : static_cast<double>(positive_rows) / static_cast<double>(s.n_rows);
  return s;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::io, "cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorKind::io, "cannot write file: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) raise(ErrorKind::io, "write failed: " + path);
}

std::vector<PatientRecord> load_directory(const std::string& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) raise(ErrorKind::io, "not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".psv")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<PatientRecord> records;
  records.reserve(files.size());
  for (const auto& f : files) {
    try {
      records.push_back(parse_patient_file(read_text_file(f.string()), f.stem().string()));
    } catch (const Error& e) {
      raise(e.kind(), f.string() + ": " + e.what());
    }
  }
  return records;
}

std::string write_prediction_file(const std::vector<double>& probs,
                                  const std::vector<int>& labels) {
  require(probs.size() == labels.size(), ErrorKind::contract,
          "write_prediction_file: probs and labels differ in length");
  std::string out = "PredictedProbability|PredictedLabel\n";
  char buf[48];
  for (std::size_t i = 0; i < probs.size(); ++i) {
    require(probs[i] >= 0.0 && probs[i] <= 1.0, ErrorKind::contract,
            "write_prediction_file: probability out of [0,1]");
    int n = std::snprintf(buf, sizeof buf, "%.4f|%d\n", probs[i], labels[i]);
    out.append(buf, static_cast<std::size_t>(n));
  }
  return out;
}

PredictionFile parse_prediction_file(std::string_view text) {
  PredictionFile result;
  std::size_t offset = 0;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (offset < text.size()) {
    std::size_t end = text.find('\n', offset);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(offset, end - offset);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    offset = end + 1;
    ++line_no;
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != "PredictedProbability|PredictedLabel") {
        raise(ErrorKind::schema, "prediction file: bad header '" + std::string(line) + "'");
      }
      saw_header = true;
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != 2) {
      raise(ErrorKind::parse,
            "prediction file line " + std::to_string(line_no) + ": expected 2 fields");
    }
    double prob = parse_double_token(fields[0], line_no, "PredictedProbability");
    double lab = parse_double_token(fields[1], line_no, "PredictedLabel");
    if (lab != 0.0 && lab != 1.0) {
      raise(ErrorKind::parse,
            "prediction file line " + std::to_string(line_no) + ": label must be 0 or 1");
    }
    result.probs.push_back(prob);
    result.labels.push_back(static_cast<int>(lab));
  }
  if (!saw_header) raise(ErrorKind::schema, "prediction file: missing header");
  return result;
}

}  // namespace heasep::psv
