#include "heasep/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>

#include "heasep/error.hpp"
#include "heasep/rng.hpp"

namespace heasep::harness {

namespace {

struct VarProfile {
  double mean;
  double sd;
  double obs_prob;
};

// Rough clinical ranges; exact values are irrelevant after z-scoring, the
// point is distinct scales and realistic missingness rates.
const VarProfile kProfiles[psv::kNumericVars] = {
    {85, 12, 0.90},   // HR
    {97, 2, 0.90},    // O2Sat
    {37, 0.6, 0.60},  // Temp
    {120, 15, 0.85},  // SBP
    {85, 10, 0.85},   // MAP
    {65, 10, 0.80},   // DBP
    {18, 4, 0.90},    // Resp
    {33, 4, 0.25},    // EtCO2
    {0, 3, 0.15},     // BaseExcess
    {24, 3, 0.18},    // HCO3
    {0.5, 0.15, 0.12},// FiO2
    {7.38, 0.05, 0.18}, // pH
    {40, 7, 0.15},    // PaCO2
    {96, 3, 0.12},    // SaO2
    {35, 20, 0.06},   // AST
    {18, 8, 0.15},    // BUN
    {80, 30, 0.06},   // Alkalinephos
    {8.5, 0.8, 0.15}, // Calcium
    {103, 4, 0.15},   // Chloride
    {1.0, 0.4, 0.15}, // Creatinine
    {0.3, 0.2, 0.04}, // Bilirubin_direct
    {130, 35, 0.20},  // Glucose
    {1.5, 0.4, 0.30}, // Lactate (planted signal)
    {2.0, 0.3, 0.14}, // Magnesium
    {3.4, 0.7, 0.12}, // Phosphate
    {4.0, 0.5, 0.15}, // Potassium
    {0.8, 0.4, 0.06}, // Bilirubin_total
    {0.1, 0.1, 0.03}, // TroponinI
    {31, 4, 0.18},    // Hct
    {10.5, 1.5, 0.18},// Hgb
    {32, 8, 0.10},    // PTT
    {10, 3, 0.18},    // WBC
    {280, 100, 0.03}, // Fibrinogen
    {200, 70, 0.15},  // Platelets
    {0, 0, 1.0},      // Age (per patient)
    {0, 0, 1.0},      // HospAdmTime (per patient)
    {0, 0, 1.0},      // ICULOS (= hour + 1)
};

constexpr int kLactate = 22;
constexpr int kAge = 34;
constexpr int kHospAdmTime = 35;
constexpr int kIculos = 36;
constexpr int kLabelLead = 6;  // label turns 1 this many hours before onset

}  // namespace

std::vector<psv::PatientRecord> generate_synthetic_cohort(const SynthOptions& options) {
  require(options.n_patients > 0, ErrorKind::contract, "synth: n_patients must be positive");
  require(options.min_hours >= 12 && options.max_hours >= options.min_hours,
          ErrorKind::contract, "synth: bad stay-length range");
  Rng rng(options.seed);

  std::vector<psv::PatientRecord> cohort;
  cohort.reserve(static_cast<std::size_t>(options.n_patients));
  for (int p = 0; p < options.n_patients; ++p) {
    psv::PatientRecord record;
    char id[16];
    std::snprintf(id, sizeof id, "p%05d", p + 1);
    record.patient_id = id;

    const int n_hours =
        options.min_hours + static_cast<int>(rng.index(
                                static_cast<std::size_t>(options.max_hours - options.min_hours + 1)));
    const bool septic = rng.bernoulli(options.septic_fraction);
    // Onset late enough that some unlabeled hours precede it.
    int onset = -1;
    if (septic) {
      const int lo = kLabelLead + 4;
      onset = lo + static_cast<int>(rng.index(static_cast<std::size_t>(n_hours - lo)));
    }

    const double age = 25.0 + rng.uniform01() * 65.0;
    const double adm_time = -rng.uniform01() * 100.0;
    const double lactate_baseline = kProfiles[kLactate].mean + rng.normal(0.0, 1.0);
    const int gender = rng.bernoulli(0.5) ? 1 : 0;
    const bool units_known = rng.bernoulli(0.7);
    const int unit1 = rng.bernoulli(0.5) ? 1 : 0;

    for (int t = 0; t < n_hours; ++t) {
      psv::HourRow row;
      const bool ramping = septic && t >= onset - kLabelLead;
      for (int j = 0; j < psv::kNumericVars; ++j) {
        if (j == kAge) {
          row.set_numeric(j, age);
          continue;
        }
        if (j == kHospAdmTime) {
          row.set_numeric(j, adm_time);
          continue;
        }
        if (j == kIculos) {
          row.set_numeric(j, static_cast<double>(t + 1));
          continue;
        }
        const VarProfile& prof = kProfiles[j];
        if (j == kLactate) {
          const double obs_prob = ramping ? 0.9 : prof.obs_prob;
          if (rng.bernoulli(obs_prob)) {
            double v = lactate_baseline + rng.normal(0.0, 0.3);
            if (ramping) v += 1.2 * static_cast<double>(t - (onset - kLabelLead) + 1);
            row.set_numeric(j, v);
          }
          continue;
        }
        if (rng.bernoulli(prof.obs_prob)) row.set_numeric(j, rng.normal(prof.mean, prof.sd));
      }
      row.categorical[0] = static_cast<std::int8_t>(gender);
      if (units_known) {
        row.categorical[1] = static_cast<std::int8_t>(unit1);
        row.categorical[2] = static_cast<std::int8_t>(1 - unit1);
      }
      row.label = (septic && t >= onset - kLabelLead) ? 1 : 0;
      record.rows.push_back(row);
    }
    cohort.push_back(std::move(record));
  }
  return cohort;
}

void write_synthetic_dataset(const std::string& dir, const SynthOptions& options) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, ErrorKind::io, "synth: cannot create directory " + dir);
  for (const auto& record : generate_synthetic_cohort(options)) {
    psv::write_text_file(dir + "/" + record.patient_id + ".psv",
                         psv::write_patient_file(record));
  }
}

}  // namespace heasep::harness
