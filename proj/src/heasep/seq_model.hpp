#ifndef HEASEP_SEQ_MODEL_HPP
#define HEASEP_SEQ_MODEL_HPP

#include <span>
#include <utility>
#include <vector>

#include "heasep/config.hpp"
#include "heasep/hea_model.hpp"
#include "heasep/ops.hpp"
#include "heasep/params.hpp"
#include "heasep/preprocess.hpp"

namespace heasep::model {

// One direction of the LSTM; the four gates are stacked (input, forget,
// candidate, output) into single matrices.
struct LstmCellParams {
  nc::Tensor w_input;   // 4H x input
  nc::Tensor w_hidden;  // 4H x H
  nc::Tensor bias;      // 4H
  int hidden = 0;
};

// Standard LSTM gate equations: sigmoid gates, tanh candidate and output
// squashing. Returns (h, c).
std::pair<nc::Tensor, nc::Tensor> lstm_cell_step(const nc::Tensor& x,
                                                 const nc::Tensor& h_prev,
                                                 const nc::Tensor& c_prev,
                                                 const LstmCellParams& params);

struct BiLstmParams {
  LstmCellParams forward;
  LstmCellParams backward;
};

// Runs both directions over the sequence and sums their final hidden
// states (the backward unit's final state is its output at position 0).
nc::Tensor bilstm_readout(std::span<const nc::Tensor> sequence, const BiLstmParams& params);

struct DenseParams {
  nc::Tensor weight;  // out x in
  nc::Tensor bias;    // out
};

nc::Tensor dense(const nc::Tensor& x, const DenseParams& params);

struct PredictionOutput {
  double prob = 0.0;
  double logit = 0.0;
};

nc::Tensor bce_loss(const nc::Tensor& prob, int label);

// The full predictor behind one interface: the aggregation model and the
// two baselines share the training loop, checkpoint format and CLI.
class SepsisModel {
 public:
  SepsisModel() = default;  // empty; fill via create/from_store

  static SepsisModel create(const harness::ModelConfig& config, Rng& rng);
  static SepsisModel from_store(const harness::ModelConfig& config, nc::ParamStore store);

  // Pre-sigmoid score; differentiable when called under an active tape.
  nc::Tensor window_logit(const prep::WindowSample& window) const;
  nc::Tensor window_prob(const prep::WindowSample& window) const;

  // Inference-mode prediction (no tape).
  PredictionOutput predict(const prep::WindowSample& window) const;

  nc::ParamStore& params() { return store_; }
  const nc::ParamStore& params() const { return store_; }
  const harness::ModelConfig& config() const { return config_; }
  harness::ModelConfig& config() { return config_; }
  prep::NormStats& norm_stats() { return norm_; }
  const prep::NormStats& norm_stats() const { return norm_; }

 private:
  void bind();  // resolves architecture handles from the store

  harness::ModelConfig config_;
  nc::ParamStore store_;
  prep::NormStats norm_{};

  EmbeddingTables tables_;
  std::vector<HeadParams> heads_;
  BiLstmParams lstm_;
  DenseParams readout_head_;   // H -> 1
  DenseParams mlp_hidden1_;    // L*40 -> 256
  DenseParams mlp_hidden2_;    // 256 -> 64
  DenseParams step_embedding_; // 40 -> d (dense-embedding baseline)
};

}  // namespace heasep::model

#endif
