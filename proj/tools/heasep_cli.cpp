// Command-line front end. Uses only the public C API (heasep.h).

#include <cinttypes>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "heasep.h"

namespace {

int fail(heasep_status status) {
  std::fprintf(stderr, "heasep: %s: %s\n", heasep_status_name(status), heasep_last_error());
  return 1;
}

struct ConfigFlags {
  std::string config_file;
  std::string model;
  int window_hours = -1;
  int embed_dim = -1;
  int heads = -1;
  int hidden = -1;
  double learning_rate = -1.0;
  int batch_size = -1;
  int epochs = -1;
  std::int64_t seed = -1;
  double positive_fraction = -1.0;
  double threshold = -1.0;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& flags) {
  cmd->add_option("--config", flags.config_file, "key=value config file");
  cmd->add_option("--model", flags.model, "hea_lstm|mlp|dense_lstm");
  cmd->add_option("--window-hours,-L", flags.window_hours, "window length L");
  cmd->add_option("--embed-dim,-d", flags.embed_dim, "embedding dimension d");
  cmd->add_option("--heads,-M", flags.heads, "aggregation heads M");
  cmd->add_option("--hidden,-H", flags.hidden, "LSTM hidden size");
  cmd->add_option("--lr", flags.learning_rate, "learning rate");
  cmd->add_option("--batch", flags.batch_size, "batch size");
  cmd->add_option("--epochs", flags.epochs, "training epochs");
  cmd->add_option("--seed", flags.seed, "RNG seed");
  cmd->add_option("--pos-fraction", flags.positive_fraction,
                  "positive sampling fraction (class rebalancing)");
  cmd->add_option("--threshold", flags.threshold, "decision threshold");
}

// Config file first, then explicit flags on top.
bool resolve_config(const ConfigFlags& flags, heasep_config* config) {
  heasep_config_defaults(config);
  if (!flags.config_file.empty()) {
    heasep_status status = heasep_config_load_file(flags.config_file.c_str(), config);
    if (status != HEASEP_OK) {
      fail(status);
      return false;
    }
  }
  if (!flags.model.empty()) {
    if (flags.model == "hea_lstm") config->model_kind = HEASEP_MODEL_HEA_LSTM;
    else if (flags.model == "mlp") config->model_kind = HEASEP_MODEL_MLP;
    else if (flags.model == "dense_lstm") config->model_kind = HEASEP_MODEL_DENSE_LSTM;
    else {
      std::fprintf(stderr, "heasep: unknown model '%s'\n", flags.model.c_str());
      return false;
    }
  }
  if (flags.window_hours > 0) config->window_hours = flags.window_hours;
  if (flags.embed_dim > 0) config->embed_dim = flags.embed_dim;
  if (flags.heads > 0) config->heads = flags.heads;
  if (flags.hidden > 0) config->hidden = flags.hidden;
  if (flags.learning_rate > 0) config->learning_rate = flags.learning_rate;
  if (flags.batch_size > 0) config->batch_size = flags.batch_size;
  if (flags.epochs >= 0) config->epochs = flags.epochs;
  if (flags.seed >= 0) config->seed = static_cast<uint64_t>(flags.seed);
  if (flags.positive_fraction >= 0) config->positive_fraction = flags.positive_fraction;
  if (flags.threshold >= 0) config->threshold = flags.threshold;
  return true;
}

void print_scores(const heasep_scores& scores) {
  std::printf("auroc=%.6f auprc=%.6f utility=%.6f threshold=%.6f\n", scores.auroc,
              scores.auprc, scores.utility_normalized, scores.threshold);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hourly early-sepsis prediction from ICU records"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "Train a model and write checkpoint + report");
  std::string train_dir, val_dir, out_dir;
  ConfigFlags train_flags;
  train->add_option("--train-dir", train_dir, ".psv training directory")->required();
  train->add_option("--val-dir", val_dir, ".psv validation directory")->required();
  train->add_option("--out", out_dir, "output directory")->required();
  add_config_flags(train, train_flags);

  // cv
  auto* cv = app.add_subcommand("cv", "Stratified k-fold cross-validation with ensembling");
  std::string cv_dir, cv_out;
  int cv_folds = 5;
  double held_fraction = 0.1;
  ConfigFlags cv_flags;
  cv->add_option("--data-dir", cv_dir, ".psv data directory")->required();
  cv->add_option("--out", cv_out, "output directory")->required();
  cv->add_option("--folds,-k", cv_folds, "number of folds");
  cv->add_option("--held-fraction", held_fraction,
                 "stratified held-out fraction scored by the vote ensembles");
  add_config_flags(cv, cv_flags);

  // predict
  auto* predict = app.add_subcommand("predict", "Write per-patient prediction files");
  std::string ckpt_path, input_dir, output_dir;
  predict->add_option("--checkpoint", ckpt_path, "model checkpoint")->required();
  predict->add_option("--input-dir", input_dir, ".psv input directory")->required();
  predict->add_option("--output-dir", output_dir, "prediction output directory")->required();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score prediction files against labels");
  std::string label_dir, prediction_dir, eval_out;
  evaluate->add_option("--label-dir", label_dir, ".psv label directory")->required();
  evaluate->add_option("--prediction-dir", prediction_dir, "prediction directory")->required();
  evaluate->add_option("--out", eval_out, "optional report output directory");

  // gradcheck
  auto* gradcheck = app.add_subcommand("gradcheck", "Verify gradients by central differences");
  int trials = 100;
  std::int64_t gc_seed = 20190915;
  gradcheck->add_option("--trials", trials, "trials per primitive");
  gradcheck->add_option("--seed", gc_seed, "RNG seed");

  // synth
  auto* synth = app.add_subcommand("synth", "Write a synthetic planted-signal dataset");
  std::string synth_dir;
  int synth_patients = 200;
  std::int64_t synth_seed = 7;
  synth->add_option("--out-dir", synth_dir, "output directory")->required();
  synth->add_option("--patients", synth_patients, "number of patients");
  synth->add_option("--seed", synth_seed, "RNG seed");

  CLI11_PARSE(app, argc, argv);

  if (train->parsed()) {
    heasep_config config;
    if (!resolve_config(train_flags, &config)) return 1;

    heasep_dataset* train_ds = nullptr;
    heasep_dataset* val_ds = nullptr;
    heasep_status status = heasep_dataset_open_dir(train_dir.c_str(), &train_ds);
    if (status != HEASEP_OK) return fail(status);
    status = heasep_dataset_open_dir(val_dir.c_str(), &val_ds);
    if (status != HEASEP_OK) return fail(status);

    heasep_summary summary;
    heasep_dataset_summary(train_ds, &summary);
    std::fprintf(stderr,
                 "training on %" PRId64 " patients (%" PRId64 " septic, %" PRId64
                 " rows, %.4f positive)\n",
                 summary.n_patients, summary.n_septic, summary.n_rows,
                 summary.positive_row_fraction);

    heasep_model* model = nullptr;
    status = heasep_train(&config, train_ds, val_ds, &model);
    if (status != HEASEP_OK) return fail(status);

    status = heasep_model_save(model, (out_dir + "/model.ckpt").c_str());
    if (status != HEASEP_OK) return fail(status);

    heasep_scores scores;
    status = heasep_evaluate_model(model, val_ds, &scores);
    if (status != HEASEP_OK) return fail(status);
    heasep_config resolved;
    heasep_model_config(model, &resolved);
    status = heasep_report_write(out_dir.c_str(), &scores, &resolved);
    if (status != HEASEP_OK) return fail(status);
    print_scores(scores);

    heasep_model_close(model);
    heasep_dataset_close(val_ds);
    heasep_dataset_close(train_ds);
    return 0;
  }

  if (cv->parsed()) {
    heasep_config config;
    if (!resolve_config(cv_flags, &config)) return 1;
    heasep_dataset* dataset = nullptr;
    heasep_status status = heasep_dataset_open_dir(cv_dir.c_str(), &dataset);
    if (status != HEASEP_OK) return fail(status);

    heasep_cv_report report;
    status = heasep_cross_validate(&config, dataset, cv_folds, held_fraction, cv_out.c_str(),
                                   &report);
    if (status != HEASEP_OK) return fail(status);

    for (int f = 0; f < report.folds; ++f) {
      std::printf("fold %d: auroc=%.6f auprc=%.6f utility=%.6f threshold=%.6f\n", f,
                  report.fold[f].auroc, report.fold[f].auprc,
                  report.fold[f].utility_normalized, report.fold[f].threshold);
    }
    std::printf("held ensemble: auroc=%.6f auprc=%.6f\n", report.auroc, report.auprc);
    std::printf("utility average/major/any = %.6f/%.6f/%.6f\n", report.utility_average_vote,
                report.utility_major_vote, report.utility_any_vote);
    heasep_dataset_close(dataset);
    return 0;
  }

  if (predict->parsed()) {
    heasep_model* model = nullptr;
    heasep_status status = heasep_model_load(ckpt_path.c_str(), &model);
    if (status != HEASEP_OK) return fail(status);
    heasep_dataset* dataset = nullptr;
    status = heasep_dataset_open_dir(input_dir.c_str(), &dataset);
    if (status != HEASEP_OK) return fail(status);
    status = heasep_predict_to_dir(model, dataset, output_dir.c_str());
    if (status != HEASEP_OK) return fail(status);
    std::fprintf(stderr, "wrote %" PRId64 " prediction files to %s\n",
                 heasep_dataset_patient_count(dataset), output_dir.c_str());
    heasep_dataset_close(dataset);
    heasep_model_close(model);
    return 0;
  }

  if (evaluate->parsed()) {
    heasep_scores scores;
    heasep_status status =
        heasep_evaluate_dirs(label_dir.c_str(), prediction_dir.c_str(), &scores);
    if (status != HEASEP_OK) return fail(status);
    print_scores(scores);
    if (!eval_out.empty()) {
      heasep_config config;
      heasep_config_defaults(&config);
      status = heasep_report_write(eval_out.c_str(), &scores, &config);
      if (status != HEASEP_OK) return fail(status);
    }
    return 0;
  }

  if (gradcheck->parsed()) {
    double primitive_error = 0.0, model_error = 0.0;
    heasep_status status = heasep_gradcheck(trials, static_cast<uint64_t>(gc_seed),
                                            &primitive_error, &model_error);
    if (status != HEASEP_OK) return fail(status);
    std::printf("max primitive relative error: %.3e\n", primitive_error);
    std::printf("max end-to-end relative error: %.3e\n", model_error);
    const bool ok = primitive_error < 1e-6 && model_error < 1e-4;
    std::printf("%s\n", ok ? "PASS" : "FAIL");
    return ok ? 0 : 1;
  }

  if (synth->parsed()) {
    heasep_status status = heasep_synth_write(synth_dir.c_str(), synth_patients,
                                              static_cast<uint64_t>(synth_seed));
    if (status != HEASEP_OK) return fail(status);
    std::fprintf(stderr, "wrote %d synthetic patients to %s\n", synth_patients,
                 synth_dir.c_str());
    return 0;
  }

  return 0;
}
