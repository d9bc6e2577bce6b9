#include "heasep.h"

#include <cstring>
#include <exception>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "heasep/harness.hpp"
#include "heasep/gradsuite.hpp"
#include "heasep/synth.hpp"

using namespace heasep;

struct heasep_dataset {
  std::vector<psv::PatientRecord> records;
};

struct heasep_model {
  model::SepsisModel model;
  harness::TrainMeta meta;
};

namespace {

thread_local std::string g_last_error;

heasep_status status_from_kind(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io: return HEASEP_E_IO;
    case ErrorKind::parse: return HEASEP_E_PARSE;
    case ErrorKind::schema: return HEASEP_E_SCHEMA;
    case ErrorKind::contract: return HEASEP_E_CONTRACT;
    case ErrorKind::config: return HEASEP_E_CONFIG;
    case ErrorKind::checkpoint: return HEASEP_E_CHECKPOINT;
    case ErrorKind::numeric: return HEASEP_E_NUMERIC;
    case ErrorKind::internal: return HEASEP_E_INTERNAL;
  }
  return HEASEP_E_INTERNAL;
}

template <typename Fn>
heasep_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return HEASEP_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_from_kind(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HEASEP_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return HEASEP_E_INTERNAL;
  }
}

heasep_status invalid_argument(const char* message) {
  g_last_error = message;
  return HEASEP_E_CONTRACT;
}

harness::ModelConfig to_internal(const heasep_config& c) {
  harness::ModelConfig out;
  switch (c.model_kind) {
    case HEASEP_MODEL_HEA_LSTM: out.model_kind = harness::ModelKind::hea_lstm; break;
    case HEASEP_MODEL_MLP: out.model_kind = harness::ModelKind::mlp; break;
    case HEASEP_MODEL_DENSE_LSTM: out.model_kind = harness::ModelKind::dense_lstm; break;
    default: raise(ErrorKind::config, "unknown model_kind " + std::to_string(c.model_kind));
  }
  out.window_hours = c.window_hours;
  out.embed_dim = c.embed_dim;
  out.heads = c.heads;
  out.hidden = c.hidden;
  out.learning_rate = c.learning_rate;
  out.batch_size = c.batch_size;
  out.epochs = c.epochs;
  out.seed = c.seed;
  out.positive_fraction = c.positive_fraction;
  out.threshold = c.threshold;
  out.adam_beta1 = c.adam_beta1;
  out.adam_beta2 = c.adam_beta2;
  out.adam_epsilon = c.adam_epsilon;
  out.validate();
  return out;
}

heasep_config from_internal(const harness::ModelConfig& c) {
  heasep_config out{};
  switch (c.model_kind) {
    case harness::ModelKind::hea_lstm: out.model_kind = HEASEP_MODEL_HEA_LSTM; break;
    case harness::ModelKind::mlp: out.model_kind = HEASEP_MODEL_MLP; break;
    case harness::ModelKind::dense_lstm: out.model_kind = HEASEP_MODEL_DENSE_LSTM; break;
  }
  out.window_hours = c.window_hours;
  out.embed_dim = c.embed_dim;
  out.heads = c.heads;
  out.hidden = c.hidden;
  out.learning_rate = c.learning_rate;
  out.batch_size = c.batch_size;
  out.epochs = c.epochs;
  out.seed = c.seed;
  out.positive_fraction = c.positive_fraction;
  out.threshold = c.threshold;
  out.adam_beta1 = c.adam_beta1;
  out.adam_beta2 = c.adam_beta2;
  out.adam_epsilon = c.adam_epsilon;
  return out;
}

heasep_scores scores_from_report(const metrics::ScoreReport& r) {
  heasep_scores s{};
  s.auroc = r.auroc;
  s.auprc = r.auprc;
  s.utility_normalized = r.utility_normalized;
  s.threshold = r.threshold;
  return s;
}

}  // namespace

extern "C" {

const char* heasep_status_name(heasep_status status) {
  switch (status) {
    case HEASEP_OK: return "ok";
    case HEASEP_E_IO: return "io-error";
    case HEASEP_E_PARSE: return "parse-error";
    case HEASEP_E_SCHEMA: return "schema-error";
    case HEASEP_E_CONTRACT: return "contract-error";
    case HEASEP_E_CONFIG: return "config-error";
    case HEASEP_E_CHECKPOINT: return "checkpoint-error";
    case HEASEP_E_NUMERIC: return "numeric-error";
    case HEASEP_E_INTERNAL: return "internal-error";
  }
  return "unknown";
}

const char* heasep_last_error(void) { return g_last_error.c_str(); }

void heasep_config_defaults(heasep_config* config) {
  if (!config) return;
  *config = from_internal(harness::ModelConfig{});
}

heasep_status heasep_config_load_file(const char* path, heasep_config* config) {
  if (!path || !config) return invalid_argument("null argument");
  return guarded([&] {
    *config = from_internal(harness::load_config_file(path, to_internal(*config)));
  });
}

heasep_status heasep_dataset_open_dir(const char* dir, heasep_dataset** out) {
  if (!dir || !out) return invalid_argument("null argument");
  *out = nullptr;
  return guarded([&] {
    auto dataset = std::make_unique<heasep_dataset>();
    dataset->records = psv::load_directory(dir);
    *out = dataset.release();
  });
}

void heasep_dataset_close(heasep_dataset* dataset) { delete dataset; }

int64_t heasep_dataset_patient_count(const heasep_dataset* dataset) {
  return dataset ? static_cast<int64_t>(dataset->records.size()) : 0;
}

heasep_status heasep_dataset_patient_id(const heasep_dataset* dataset, int64_t index,
                                        char* buffer, size_t buffer_size) {
  if (!dataset || !buffer || buffer_size == 0) return invalid_argument("null argument");
  if (index < 0 || index >= static_cast<int64_t>(dataset->records.size()))
    return invalid_argument("patient index out of range");
  const std::string& id = dataset->records[static_cast<std::size_t>(index)].patient_id;
  if (id.size() + 1 > buffer_size) return invalid_argument("buffer too small");
  std::memcpy(buffer, id.c_str(), id.size() + 1);
  return HEASEP_OK;
}

int64_t heasep_dataset_patient_hours(const heasep_dataset* dataset, int64_t index) {
  if (!dataset || index < 0 || index >= static_cast<int64_t>(dataset->records.size()))
    return -1;
  return static_cast<int64_t>(dataset->records[static_cast<std::size_t>(index)].n_hours());
}

heasep_status heasep_dataset_summary(const heasep_dataset* dataset, heasep_summary* out) {
  if (!dataset || !out) return invalid_argument("null argument");
  return guarded([&] {
    const psv::DatasetSummary s = psv::summarize(dataset->records);
    out->n_patients = static_cast<int64_t>(s.n_patients);
    out->n_septic = static_cast<int64_t>(s.n_septic);
    out->n_rows = static_cast<int64_t>(s.n_rows);
    out->positive_row_fraction = s.positive_row_fraction;
  });
}

heasep_status heasep_train(const heasep_config* config, const heasep_dataset* train,
                           const heasep_dataset* validation, heasep_model** out) {
  if (!config || !train || !out) return invalid_argument("null argument");
  *out = nullptr;
  return guarded([&] {
    static const std::vector<psv::PatientRecord> kEmpty;
    auto handle = std::make_unique<heasep_model>();
    harness::TrainOutcome outcome = harness::train_on_records(
        to_internal(*config), train->records, validation ? validation->records : kEmpty);
    handle->model = std::move(outcome.model);
    handle->meta = outcome.meta;
    *out = handle.release();
  });
}

heasep_status heasep_model_save(const heasep_model* model, const char* path) {
  if (!model || !path) return invalid_argument("null argument");
  return guarded([&] { harness::save_checkpoint(path, model->model, model->meta); });
}

heasep_status heasep_model_load(const char* path, heasep_model** out) {
  if (!path || !out) return invalid_argument("null argument");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<heasep_model>();
    handle->model = harness::load_checkpoint(path, &handle->meta);
    *out = handle.release();
  });
}

void heasep_model_close(heasep_model* model) { delete model; }

void heasep_model_config(const heasep_model* model, heasep_config* out) {
  if (!model || !out) return;
  *out = from_internal(model->model.config());
}

heasep_status heasep_predict_patient(const heasep_model* model, const heasep_dataset* dataset,
                                     int64_t patient_index, double* probs, int32_t* labels,
                                     int64_t capacity, int64_t* n_hours) {
  if (!model || !dataset || !probs || !labels || !n_hours)
    return invalid_argument("null argument");
  if (patient_index < 0 || patient_index >= static_cast<int64_t>(dataset->records.size()))
    return invalid_argument("patient index out of range");
  return guarded([&] {
    const auto& record = dataset->records[static_cast<std::size_t>(patient_index)];
    *n_hours = static_cast<int64_t>(record.n_hours());
    require(capacity >= *n_hours, ErrorKind::contract,
            "output capacity smaller than the patient's hour count");
    const auto pred =
        harness::predict_patient(model->model, record, model->model.config().threshold);
    for (std::size_t i = 0; i < pred.probs.size(); ++i) {
      probs[i] = pred.probs[i];
      labels[i] = pred.predictions[i];
    }
  });
}

heasep_status heasep_predict_to_dir(const heasep_model* model, const heasep_dataset* dataset,
                                    const char* out_dir) {
  if (!model || !dataset || !out_dir) return invalid_argument("null argument");
  return guarded([&] {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    require(!ec, ErrorKind::io, std::string("cannot create output directory ") + out_dir);
    for (const auto& record : dataset->records) {
      const auto pred =
          harness::predict_patient(model->model, record, model->model.config().threshold);
      psv::write_text_file(std::string(out_dir) + "/" + record.patient_id + ".psv",
                           psv::write_prediction_file(pred.probs, pred.predictions));
    }
  });
}

heasep_status heasep_evaluate_model(const heasep_model* model, const heasep_dataset* dataset,
                                    heasep_scores* out) {
  if (!model || !dataset || !out) return invalid_argument("null argument");
  return guarded([&] {
    std::vector<metrics::PatientPrediction> cohort;
    cohort.reserve(dataset->records.size());
    for (const auto& record : dataset->records)
      cohort.push_back(
          harness::predict_patient(model->model, record, model->model.config().threshold));
    *out = scores_from_report(
        harness::score_cohort(cohort, model->model.config().threshold));
  });
}

heasep_status heasep_evaluate_dirs(const char* label_dir, const char* prediction_dir,
                                   heasep_scores* out) {
  if (!label_dir || !prediction_dir || !out) return invalid_argument("null argument");
  return guarded([&] {
    *out = scores_from_report(harness::cmd_evaluate(label_dir, prediction_dir));
  });
}

heasep_status heasep_report_write(const char* out_dir, const heasep_scores* scores,
                                  const heasep_config* config) {
  if (!out_dir || !scores || !config) return invalid_argument("null argument");
  return guarded([&] {
    metrics::ScoreReport report;
    report.auroc = scores->auroc;
    report.auprc = scores->auprc;
    report.utility_normalized = scores->utility_normalized;
    report.threshold = scores->threshold;
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    require(!ec, ErrorKind::io, std::string("cannot create output directory ") + out_dir);
    harness::write_report_files(out_dir, report, to_internal(*config));
  });
}

heasep_status heasep_cross_validate(const heasep_config* config,
                                    const heasep_dataset* dataset, int32_t folds,
                                    double held_fraction, const char* out_dir,
                                    heasep_cv_report* out) {
  if (!config || !dataset || !out) return invalid_argument("null argument");
  if (folds < 2 || folds > HEASEP_MAX_FOLDS)
    return invalid_argument("folds must be in [2, HEASEP_MAX_FOLDS]");
  return guarded([&] {
    harness::CvOutcome outcome =
        harness::cross_validate(to_internal(*config), dataset->records, folds, held_fraction,
                                nullptr, out_dir ? out_dir : "");
    *out = heasep_cv_report{};
    out->folds = folds;
    for (int f = 0; f < folds; ++f) {
      const auto& fs = outcome.report.folds[static_cast<std::size_t>(f)];
      out->fold[f].auroc = fs.auroc;
      out->fold[f].auprc = fs.auprc;
      out->fold[f].utility_normalized = fs.utility;
      out->fold[f].threshold = fs.threshold;
    }
    out->threshold_mean = outcome.report.threshold;
    out->auroc = outcome.report.auroc;
    out->auprc = outcome.report.auprc;
    out->utility_average_vote = outcome.report.utility_average_vote;
    out->utility_major_vote = outcome.report.utility_major_vote;
    out->utility_any_vote = outcome.report.utility_any_vote;
  });
}

heasep_status heasep_synth_write(const char* dir, int32_t n_patients, uint64_t seed) {
  if (!dir) return invalid_argument("null argument");
  return guarded([&] {
    harness::SynthOptions options;
    options.n_patients = n_patients;
    options.seed = seed;
    harness::write_synthetic_dataset(dir, options);
  });
}

heasep_status heasep_gradcheck(int32_t primitive_trials, uint64_t seed,
                               double* max_primitive_error, double* max_model_error) {
  return guarded([&] {
    const harness::GradSuiteResult result =
        harness::run_gradcheck_suite(primitive_trials, seed);
    require(result.finite, ErrorKind::numeric, "gradcheck: non-finite value encountered");
    if (max_primitive_error) *max_primitive_error = result.max_primitive_error;
    if (max_model_error) *max_model_error = result.max_model_error;
  });
}

}  // extern "C"
