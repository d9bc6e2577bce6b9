#ifndef HEASEP_TRAINER_HPP
#define HEASEP_TRAINER_HPP

#include <functional>
#include <vector>

#include "heasep/metrics.hpp"
#include "heasep/seq_model.hpp"

namespace heasep::harness {

struct TrainMeta {
  int epochs_run = 0;
  double final_train_loss = 0.0;
  std::size_t skipped_steps = 0;
};

// Trains the model in place on already-normalized records. One epoch draws
// as many windows as the training set contains, rebalanced by the
// configured positive fraction; an optimizer step runs per batch. Ends by
// rounding parameters through f32 so the in-memory model is identical to
// its checkpoint. Aborts with ErrorKind::numeric on a non-finite loss.
TrainMeta train_model(model::SepsisModel& model,
                      const std::vector<psv::PatientRecord>& train_records, Rng& rng,
                      const std::function<void(int epoch, double mean_loss)>& on_epoch = {});

// Per-hour probabilities for a raw (unnormalized) record, using the model's
// stored normalization stats.
std::vector<double> predict_probs(const model::SepsisModel& model,
                                  const psv::PatientRecord& raw_record);

metrics::PatientPrediction predict_patient(const model::SepsisModel& model,
                                           const psv::PatientRecord& raw_record,
                                           double threshold);

}  // namespace heasep::harness

#endif
