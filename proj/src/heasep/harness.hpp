#ifndef HEASEP_HARNESS_HPP
#define HEASEP_HARNESS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "heasep/checkpoint.hpp"
#include "heasep/metrics.hpp"
#include "heasep/seq_model.hpp"
#include "heasep/trainer.hpp"

namespace heasep::harness {

struct TrainOutcome {
  model::SepsisModel model;
  TrainMeta meta;
  metrics::ScoreReport validation;
};

// Fits the normalizer on the training records only, trains the configured
// model, then selects the decision threshold on the validation records by
// normalized utility. Validation may be empty (threshold keeps its
// configured value and the report stays zeroed).
TrainOutcome train_on_records(const ModelConfig& config,
                              const std::vector<psv::PatientRecord>& train_records,
                              const std::vector<psv::PatientRecord>& val_records,
                              const std::function<void(int, double)>& on_epoch = {});

// train + checkpoint/report files under out_dir (model.ckpt, report.txt,
// report.kv).
TrainOutcome cmd_train(const ModelConfig& config, const std::string& train_dir,
                       const std::string& val_dir, const std::string& out_dir,
                       bool verbose = false);

// Deterministic stratified partition: patients sorted by id, septic and
// non-septic shuffled separately by seed, dealt round-robin into k folds.
std::vector<int> stratified_folds(const std::vector<psv::PatientRecord>& records, int k,
                                  std::uint64_t seed);

// Indices of a stratified held-out subset of the given fraction.
std::vector<std::size_t> stratified_held(const std::vector<psv::PatientRecord>& records,
                                         double fraction, std::uint64_t seed);

struct CvOutcome {
  metrics::ScoreReport report;
  std::vector<double> fold_thresholds;
};

// K-fold cross-validation with an internal stratified held split used to
// evaluate the average / majority / any vote ensembles of the fold models.
// held_records, when provided, replaces the internal split. out_dir, when
// nonempty, receives fold checkpoints and the cv report.
CvOutcome cross_validate(const ModelConfig& config,
                         std::vector<psv::PatientRecord> records, int folds,
                         double held_fraction,
                         const std::vector<psv::PatientRecord>* held_records,
                         const std::string& out_dir, bool verbose = false);

CvOutcome cmd_cv(const ModelConfig& config, const std::string& data_dir, int folds,
                 double held_fraction, const std::optional<std::string>& held_dir,
                 const std::string& out_dir, bool verbose = false);

// One prediction file per patient, named <patient_id>.psv.
void cmd_predict(const std::string& checkpoint_path, const std::string& input_dir,
                 const std::string& output_dir);

// Scores prediction files against label files; every patient must appear
// in both directories.
metrics::ScoreReport cmd_evaluate(const std::string& label_dir,
                                  const std::string& prediction_dir);

// Pools all hours of the cohort for AUROC/AUPRC and computes the
// normalized utility from the binary predictions.
metrics::ScoreReport score_cohort(const std::vector<metrics::PatientPrediction>& cohort,
                                  double threshold);

void write_report_files(const std::string& out_dir, const metrics::ScoreReport& report,
                        const ModelConfig& config);

}  // namespace heasep::harness

#endif
