#ifndef HEASEP_SYNTH_HPP
#define HEASEP_SYNTH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "heasep/psv.hpp"

namespace heasep::harness {

// Synthetic planted-signal cohort: realistic baselines and missingness for
// all variables, plus one lab (Lactate) that ramps up, and is sampled much
// more often, starting six hours before a synthetic onset. Labels follow
// the challenge convention: 1 from six hours before onset onward.
struct SynthOptions {
  int n_patients = 200;
  std::uint64_t seed = 7;
  double septic_fraction = 0.3;
  int min_hours = 24;
  int max_hours = 56;
};

std::vector<psv::PatientRecord> generate_synthetic_cohort(const SynthOptions& options);

// Writes one <patient_id>.psv per patient into dir (created if absent).
void write_synthetic_dataset(const std::string& dir, const SynthOptions& options);

}  // namespace heasep::harness

#endif
