#include "heasep/trainer.hpp"

#include <cmath>

#include "heasep/adam.hpp"
#include "heasep/metrics.hpp"

namespace heasep::harness {

namespace {

struct WindowRef {
  std::size_t record;
  int t_end;
};

}  // namespace

TrainMeta train_model(model::SepsisModel& model,
                      const std::vector<psv::PatientRecord>& train_records, Rng& rng,
                      const std::function<void(int, double)>& on_epoch) {
  const ModelConfig& config = model.config();
  require(!train_records.empty(), ErrorKind::contract, "train_model: empty training set");

  std::vector<WindowRef> positives, negatives;
  for (std::size_t r = 0; r < train_records.size(); ++r) {
    const auto& record = train_records[r];
    for (int t = 0; t < static_cast<int>(record.n_hours()); ++t) {
      (record.rows[static_cast<std::size_t>(t)].label ? positives : negatives)
          .push_back({r, t});
    }
  }
  const std::size_t total_windows = positives.size() + negatives.size();
  require(total_windows > 0, ErrorKind::contract, "train_model: no windows in training set");

  auto draw = [&]() -> WindowRef {
    if (positives.empty()) return negatives[rng.index(negatives.size())];
    if (negatives.empty()) return positives[rng.index(positives.size())];
    if (rng.bernoulli(config.positive_fraction)) return positives[rng.index(positives.size())];
    return negatives[rng.index(negatives.size())];
  };

  nc::AdamConfig adam_config;
  adam_config.learning_rate = config.learning_rate;
  adam_config.beta1 = config.adam_beta1;
  adam_config.beta2 = config.adam_beta2;
  adam_config.epsilon = config.adam_epsilon;
  nc::Adam optimizer(adam_config, model.params().tensors());

  TrainMeta meta;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t drawn = 0;
    while (drawn < total_windows) {
      const std::size_t batch = std::min(static_cast<std::size_t>(config.batch_size),
                                         total_windows - drawn);
      const double inv_batch = 1.0 / static_cast<double>(batch);
      for (std::size_t b = 0; b < batch; ++b) {
        const WindowRef ref = draw();
        const prep::WindowSample window =
            prep::build_window(train_records[ref.record], ref.t_end, config.window_hours);
        nc::Tape tape;
        nc::TapeScope scope(tape);
        nc::Tensor prob = model.window_prob(window);
        nc::Tensor loss = model::bce_loss(prob, window.label);
        const double loss_value = loss.scalar();
        if (!std::isfinite(loss_value)) {
          raise(ErrorKind::numeric,
                "train_model: non-finite loss at epoch " + std::to_string(epoch) +
                    " (patient " + window.patient_id + ", hour " +
                    std::to_string(window.t_end) + ")");
        }
        loss_sum += loss_value;
        tape.backward(nc::scale(loss, inv_batch));
      }
      optimizer.step();
      drawn += batch;
    }
    meta.epochs_run = epoch + 1;
    meta.final_train_loss = loss_sum / static_cast<double>(total_windows);
    if (on_epoch) on_epoch(epoch, meta.final_train_loss);
  }
  meta.skipped_steps = optimizer.skipped_steps();

  model.params().round_to_f32();
  return meta;
}

std::vector<double> predict_probs(const model::SepsisModel& model,
                                  const psv::PatientRecord& raw_record) {
  psv::PatientRecord normalized = prep::apply_normalizer(raw_record, model.norm_stats());
  std::vector<double> probs;
  probs.reserve(normalized.n_hours());
  for (int t = 0; t < static_cast<int>(normalized.n_hours()); ++t) {
    const prep::WindowSample window =
        prep::build_window(normalized, t, model.config().window_hours);
    probs.push_back(model.predict(window).prob);
  }
  return probs;
}

metrics::PatientPrediction predict_patient(const model::SepsisModel& model,
                                           const psv::PatientRecord& raw_record,
                                           double threshold) {
  metrics::PatientPrediction p;
  p.patient_id = raw_record.patient_id;
  p.probs = predict_probs(model, raw_record);
  p.predictions.reserve(p.probs.size());
  for (double prob : p.probs) p.predictions.push_back(prob >= threshold ? 1 : 0);
  for (const auto& row : raw_record.rows) p.labels.push_back(row.label);
  return p;
}

}  // namespace heasep::harness
