#include "heasep/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

namespace heasep::harness {

namespace fs = std::filesystem;

namespace {

bool cohort_has_both_classes(const std::vector<metrics::PatientPrediction>& cohort) {
  bool pos = false, neg = false;
  for (const auto& p : cohort)
    for (int y : p.labels) (y == 1 ? pos : neg) = true;
  return pos && neg;
}

bool cohort_has_septic(const std::vector<metrics::PatientPrediction>& cohort) {
  for (const auto& p : cohort)
    for (int y : p.labels)
      if (y == 1) return true;
  return false;
}

}  // namespace

metrics::ScoreReport score_cohort(const std::vector<metrics::PatientPrediction>& cohort,
                                  double threshold) {
  metrics::ScoreReport report;
  report.threshold = threshold;
  if (cohort.empty()) return report;

  std::vector<double> pooled_probs;
  std::vector<int> pooled_labels;
  for (const auto& p : cohort) {
    pooled_probs.insert(pooled_probs.end(), p.probs.begin(), p.probs.end());
    pooled_labels.insert(pooled_labels.end(), p.labels.begin(), p.labels.end());
  }
  if (cohort_has_both_classes(cohort)) {
    report.auroc = metrics::auroc(pooled_probs, pooled_labels);
    report.auprc = metrics::auprc(pooled_probs, pooled_labels);
  } else {
    std::fprintf(stderr, "heasep: warning: single-class cohort, AUROC/AUPRC not defined\n");
  }
  if (cohort_has_septic(cohort)) {
    report.utility_normalized = metrics::utility_normalized(cohort);
  } else {
    std::fprintf(stderr, "heasep: warning: no septic patient in cohort, utility not defined\n");
  }
  return report;
}

TrainOutcome train_on_records(const ModelConfig& config,
                              const std::vector<psv::PatientRecord>& train_records,
                              const std::vector<psv::PatientRecord>& val_records,
                              const std::function<void(int, double)>& on_epoch) {
  config.validate();
  require(!train_records.empty(), ErrorKind::contract, "train: empty training set");

  const prep::NormStats stats = prep::fit_normalizer(train_records);
  std::vector<psv::PatientRecord> normalized = train_records;
  for (auto& r : normalized) prep::apply_normalizer_in_place(r, stats);

  Rng rng(config.seed);
  TrainOutcome outcome{model::SepsisModel::create(config, rng), {}, {}};
  outcome.model.norm_stats() = stats;
  outcome.meta = train_model(outcome.model, normalized, rng, on_epoch);

  if (!val_records.empty()) {
    std::vector<metrics::PatientPrediction> cohort;
    cohort.reserve(val_records.size());
    for (const auto& r : val_records)
      cohort.push_back(predict_patient(outcome.model, r, config.threshold));

    double threshold = config.threshold;
    if (cohort_has_septic(cohort)) {
      threshold = metrics::select_threshold(cohort);
      for (auto& p : cohort)
        for (std::size_t i = 0; i < p.probs.size(); ++i)
          p.predictions[i] = p.probs[i] >= threshold ? 1 : 0;
    } else {
      std::fprintf(stderr,
                   "heasep: warning: validation has no septic patient, keeping threshold %.4f\n",
                   threshold);
    }
    outcome.model.config().threshold = threshold;
    outcome.validation = score_cohort(cohort, threshold);
  }
  return outcome;
}

TrainOutcome cmd_train(const ModelConfig& config, const std::string& train_dir,
                       const std::string& val_dir, const std::string& out_dir, bool verbose) {
  const auto train_records = psv::load_directory(train_dir);
  require(!train_records.empty(), ErrorKind::contract,
          "train: no .psv files in " + train_dir);
  const auto val_records = psv::load_directory(val_dir);

  auto on_epoch = [&](int epoch, double loss) {
    if (verbose) std::fprintf(stderr, "epoch %d: train loss %.6f\n", epoch, loss);
  };
  TrainOutcome outcome = train_on_records(config, train_records, val_records, on_epoch);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  require(!ec, ErrorKind::io, "cannot create output directory " + out_dir);
  save_checkpoint(out_dir + "/model.ckpt", outcome.model, outcome.meta);
  write_report_files(out_dir, outcome.validation, outcome.model.config());
  return outcome;
}

std::vector<int> stratified_folds(const std::vector<psv::PatientRecord>& records, int k,
                                  std::uint64_t seed) {
  require(k >= 1, ErrorKind::contract, "stratified_folds: k must be >= 1");

  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return records[a].patient_id < records[b].patient_id;
  });

  std::vector<std::size_t> septic, normal;
  for (std::size_t i : order) (records[i].is_septic() ? septic : normal).push_back(i);

  Rng rng(seed);
  rng.shuffle(septic);
  rng.shuffle(normal);

  std::vector<int> fold(records.size(), -1);
  int next = 0;
  for (std::size_t i : septic) fold[i] = next++ % k;
  next = 0;
  for (std::size_t i : normal) fold[i] = next++ % k;
  return fold;
}

std::vector<std::size_t> stratified_held(const std::vector<psv::PatientRecord>& records,
                                         double fraction, std::uint64_t seed) {
  require(fraction >= 0.0 && fraction < 1.0, ErrorKind::contract,
          "stratified_held: fraction must be in [0, 1)");
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return records[a].patient_id < records[b].patient_id;
  });
  std::vector<std::size_t> septic, normal;
  for (std::size_t i : order) (records[i].is_septic() ? septic : normal).push_back(i);

  // Distinct stream from the fold assignment so held and folds are
  // independent choices of the same seed.
  Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
  rng.shuffle(septic);
  rng.shuffle(normal);

  std::vector<std::size_t> held;
  const auto take = [&](const std::vector<std::size_t>& pool) {
    const std::size_t n = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(pool.size())));
    for (std::size_t i = 0; i < n; ++i) held.push_back(pool[i]);
  };
  take(septic);
  take(normal);
  std::sort(held.begin(), held.end());
  return held;
}

CvOutcome cross_validate(const ModelConfig& config, std::vector<psv::PatientRecord> records,
                         int folds, double held_fraction,
                         const std::vector<psv::PatientRecord>* held_records,
                         const std::string& out_dir, bool verbose) {
  require(folds >= 2, ErrorKind::contract, "cv: at least 2 folds required");

  std::vector<psv::PatientRecord> held;
  if (held_records) {
    held = *held_records;
  } else if (held_fraction > 0.0) {
    const auto held_idx = stratified_held(records, held_fraction, config.seed);
    std::vector<psv::PatientRecord> remaining;
    std::size_t next_held = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (next_held < held_idx.size() && held_idx[next_held] == i) {
        held.push_back(std::move(records[i]));
        ++next_held;
      } else {
        remaining.push_back(std::move(records[i]));
      }
    }
    records = std::move(remaining);
  }

  std::size_t n_septic = 0;
  for (const auto& r : records) n_septic += r.is_septic();
  const std::size_t n_normal = records.size() - n_septic;
  require(n_septic >= static_cast<std::size_t>(folds) &&
              n_normal >= static_cast<std::size_t>(folds),
          ErrorKind::contract,
          "cv: need at least k septic and k non-septic patients, have " +
              std::to_string(n_septic) + " septic / " + std::to_string(n_normal) +
              " non-septic");

  const std::vector<int> assignment = stratified_folds(records, folds, config.seed);

  if (!out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    require(!ec, ErrorKind::io, "cannot create output directory " + out_dir);
  }

  CvOutcome outcome;
  std::vector<std::vector<std::vector<double>>> held_fold_probs;  // [fold][patient][hour]
  for (int f = 0; f < folds; ++f) {
    std::vector<psv::PatientRecord> fold_train, fold_val;
    for (std::size_t i = 0; i < records.size(); ++i)
      (assignment[i] == f ? fold_val : fold_train).push_back(records[i]);

    if (verbose) std::fprintf(stderr, "fold %d: %zu train / %zu validation patients\n", f,
                              fold_train.size(), fold_val.size());
    TrainOutcome fold_outcome = train_on_records(config, fold_train, fold_val);

    metrics::FoldScores scores;
    scores.auroc = fold_outcome.validation.auroc;
    scores.auprc = fold_outcome.validation.auprc;
    scores.utility = fold_outcome.validation.utility_normalized;
    scores.threshold = fold_outcome.model.config().threshold;
    outcome.report.folds.push_back(scores);
    outcome.fold_thresholds.push_back(scores.threshold);

    if (!held.empty()) {
      std::vector<std::vector<double>> probs;
      probs.reserve(held.size());
      for (const auto& r : held) probs.push_back(predict_probs(fold_outcome.model, r));
      held_fold_probs.push_back(std::move(probs));
    }

    if (!out_dir.empty()) {
      save_checkpoint(out_dir + "/fold_" + std::to_string(f) + ".ckpt", fold_outcome.model,
                      fold_outcome.meta);
    }
  }

  double threshold_mean = 0.0;
  for (double t : outcome.fold_thresholds) threshold_mean += t;
  threshold_mean /= static_cast<double>(folds);
  outcome.report.threshold = threshold_mean;

  if (!held.empty()) {
    // Ensemble the fold models on the held cohort.
    const auto cohort_for_mode = [&](metrics::EnsembleMode mode) {
      std::vector<metrics::PatientPrediction> cohort;
      cohort.reserve(held.size());
      for (std::size_t p = 0; p < held.size(); ++p) {
        metrics::PatientPrediction pred;
        pred.patient_id = held[p].patient_id;
        std::vector<std::vector<double>> fold_probs;
        fold_probs.reserve(static_cast<std::size_t>(folds));
        for (int f = 0; f < folds; ++f) fold_probs.push_back(held_fold_probs[static_cast<std::size_t>(f)][p]);
        pred.predictions = metrics::ensemble(fold_probs, mode, threshold_mean);
        for (std::size_t i = 0; i < fold_probs[0].size(); ++i) {
          double mean = 0.0;
          for (const auto& probs : fold_probs) mean += probs[i];
          pred.probs.push_back(mean / static_cast<double>(folds));
        }
        for (const auto& row : held[p].rows) pred.labels.push_back(row.label);
        cohort.push_back(std::move(pred));
      }
      return cohort;
    };

    const auto average_cohort = cohort_for_mode(metrics::EnsembleMode::average);
    outcome.report.utility_average_vote = metrics::utility_normalized(average_cohort);
    outcome.report.utility_major_vote =
        metrics::utility_normalized(cohort_for_mode(metrics::EnsembleMode::major_vote));
    outcome.report.utility_any_vote =
        metrics::utility_normalized(cohort_for_mode(metrics::EnsembleMode::any_vote));
    outcome.report.has_ensemble = true;
    outcome.report.utility_normalized = outcome.report.utility_average_vote;

    if (cohort_has_both_classes(average_cohort)) {
      std::vector<double> pooled_probs;
      std::vector<int> pooled_labels;
      for (const auto& p : average_cohort) {
        pooled_probs.insert(pooled_probs.end(), p.probs.begin(), p.probs.end());
        pooled_labels.insert(pooled_labels.end(), p.labels.begin(), p.labels.end());
      }
      outcome.report.auroc = metrics::auroc(pooled_probs, pooled_labels);
      outcome.report.auprc = metrics::auprc(pooled_probs, pooled_labels);
    }
  } else {
    double auroc_mean = 0.0, auprc_mean = 0.0, utility_mean = 0.0;
    for (const auto& f : outcome.report.folds) {
      auroc_mean += f.auroc;
      auprc_mean += f.auprc;
      utility_mean += f.utility;
    }
    outcome.report.auroc = auroc_mean / static_cast<double>(folds);
    outcome.report.auprc = auprc_mean / static_cast<double>(folds);
    outcome.report.utility_normalized = utility_mean / static_cast<double>(folds);
  }

  if (!out_dir.empty()) write_report_files(out_dir, outcome.report, config);
  return outcome;
}

CvOutcome cmd_cv(const ModelConfig& config, const std::string& data_dir, int folds,
                 double held_fraction, const std::optional<std::string>& held_dir,
                 const std::string& out_dir, bool verbose) {
  auto records = psv::load_directory(data_dir);
  require(!records.empty(), ErrorKind::contract, "cv: no .psv files in " + data_dir);
  if (held_dir) {
    const auto held_records = psv::load_directory(*held_dir);
    return cross_validate(config, std::move(records), folds, 0.0, &held_records, out_dir,
                          verbose);
  }
  return cross_validate(config, std::move(records), folds, held_fraction, nullptr, out_dir,
                        verbose);
}

void cmd_predict(const std::string& checkpoint_path, const std::string& input_dir,
                 const std::string& output_dir) {
  const model::SepsisModel model = load_checkpoint(checkpoint_path);
  const auto records = psv::load_directory(input_dir);
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  require(!ec, ErrorKind::io, "cannot create output directory " + output_dir);
  for (const auto& record : records) {
    const auto pred = predict_patient(model, record, model.config().threshold);
    psv::write_text_file(output_dir + "/" + record.patient_id + ".psv",
                         psv::write_prediction_file(pred.probs, pred.predictions));
  }
}

metrics::ScoreReport cmd_evaluate(const std::string& label_dir,
                                  const std::string& prediction_dir) {
  const auto records = psv::load_directory(label_dir);
  require(!records.empty(), ErrorKind::contract, "evaluate: no .psv files in " + label_dir);

  std::vector<metrics::PatientPrediction> cohort;
  cohort.reserve(records.size());
  for (const auto& record : records) {
    const std::string path = prediction_dir + "/" + record.patient_id + ".psv";
    if (!fs::exists(path)) {
      raise(ErrorKind::io, "evaluate: no prediction file for patient " + record.patient_id);
    }
    const auto pred = psv::parse_prediction_file(psv::read_text_file(path));
    require(pred.probs.size() == record.n_hours(), ErrorKind::contract,
            "evaluate: prediction length mismatch for patient " + record.patient_id);
    metrics::PatientPrediction p;
    p.patient_id = record.patient_id;
    p.probs = pred.probs;
    p.predictions = pred.labels;
    for (const auto& row : record.rows) p.labels.push_back(row.label);
    cohort.push_back(std::move(p));
  }

  // Prediction files without a matching label file are an error too.
  for (const auto& entry : fs::directory_iterator(prediction_dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".psv") continue;
    const std::string stem = entry.path().stem().string();
    const bool known = std::any_of(records.begin(), records.end(),
                                   [&](const auto& r) { return r.patient_id == stem; });
    require(known, ErrorKind::contract,
            "evaluate: prediction for unknown patient " + stem);
  }

  metrics::ScoreReport report = score_cohort(cohort, 0.0);
  return report;
}

void write_report_files(const std::string& out_dir, const metrics::ScoreReport& report,
                        const ModelConfig& config) {
  std::string text = metrics::report_text(report);
  text += "\nResolved configuration:\n";
  text += serialize_config(config);
  psv::write_text_file(out_dir + "/report.txt", text);

  std::string kv = metrics::report_kv(report);
  std::string config_kv = serialize_config(config);
  std::size_t offset = 0;
  while (offset < config_kv.size()) {
    std::size_t end = config_kv.find('\n', offset);
    kv += "config." + config_kv.substr(offset, end - offset) + "\n";
    offset = end + 1;
  }
  psv::write_text_file(out_dir + "/report.kv", kv);
}

}  // namespace heasep::harness
