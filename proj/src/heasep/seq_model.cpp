#include "heasep/seq_model.hpp"

#include <cmath>

namespace heasep::model {

using harness::ModelConfig;
using harness::ModelKind;
using nc::Tensor;

namespace {

constexpr int kMlpHidden1 = 256;
constexpr int kMlpHidden2 = 64;

}  // namespace

std::pair<Tensor, Tensor> lstm_cell_step(const Tensor& x, const Tensor& h_prev,
                                         const Tensor& c_prev, const LstmCellParams& params) {
  const int H = params.hidden;
  Tensor z = nc::add(nc::add(nc::matvec(params.w_input, x), nc::matvec(params.w_hidden, h_prev)),
                     params.bias);
  Tensor gate_in = nc::sigmoid(nc::slice(z, 0, H));
  Tensor gate_forget = nc::sigmoid(nc::slice(z, H, H));
  Tensor candidate = nc::tanh(nc::slice(z, 2 * H, H));
  Tensor gate_out = nc::sigmoid(nc::slice(z, 3 * H, H));
  Tensor c = nc::add(nc::elementwise_mul(gate_forget, c_prev),
                     nc::elementwise_mul(gate_in, candidate));
  Tensor h = nc::elementwise_mul(gate_out, nc::tanh(c));
  return {h, c};
}

Tensor bilstm_readout(std::span<const Tensor> sequence, const BiLstmParams& params) {
  require(!sequence.empty(), ErrorKind::contract, "bilstm_readout: empty sequence");
  const int H = params.forward.hidden;

  Tensor h_fwd = Tensor::zeros({H});
  Tensor c_fwd = Tensor::zeros({H});
  for (std::size_t t = 0; t < sequence.size(); ++t) {
    auto [h, c] = lstm_cell_step(sequence[t], h_fwd, c_fwd, params.forward);
    h_fwd = h;
    c_fwd = c;
  }

  Tensor h_bwd = Tensor::zeros({H});
  Tensor c_bwd = Tensor::zeros({H});
  for (std::size_t i = sequence.size(); i-- > 0;) {
    auto [h, c] = lstm_cell_step(sequence[i], h_bwd, c_bwd, params.backward);
    h_bwd = h;
    c_bwd = c;
  }

  return nc::add(h_fwd, h_bwd);
}

Tensor dense(const Tensor& x, const DenseParams& params) {
  return nc::add(nc::matvec(params.weight, x), params.bias);
}

Tensor bce_loss(const Tensor& prob, int label) {
  require(label == 0 || label == 1, ErrorKind::contract, "bce_loss: label must be 0 or 1");
  return nc::bce(prob, static_cast<double>(label));
}

namespace {

LstmCellParams create_lstm_cell(nc::ParamStore& store, const std::string& prefix, int input,
                                int hidden, Rng& rng) {
  LstmCellParams p;
  p.hidden = hidden;
  p.w_input = store.create(prefix + ".w_input", {4 * hidden, input}, rng);
  p.w_hidden = store.create(prefix + ".w_hidden", {4 * hidden, hidden}, rng);
  p.bias = store.create_zero(prefix + ".bias", {4 * hidden});
  return p;
}

LstmCellParams bind_lstm_cell(const nc::ParamStore& store, const std::string& prefix,
                              int hidden) {
  LstmCellParams p;
  p.hidden = hidden;
  p.w_input = store.get(prefix + ".w_input");
  p.w_hidden = store.get(prefix + ".w_hidden");
  p.bias = store.get(prefix + ".bias");
  return p;
}

}  // namespace

SepsisModel SepsisModel::create(const ModelConfig& config, Rng& rng) {
  config.validate();
  SepsisModel m;
  m.config_ = config;
  const int d = config.embed_dim;
  const int H = config.hidden;
  const int L = config.window_hours;

  switch (config.model_kind) {
    case ModelKind::hea_lstm: {
      m.tables_ = create_embedding_tables(m.store_, d, rng);
      m.heads_ = create_heads(m.store_, config.heads, d, rng);
      m.lstm_.forward = create_lstm_cell(m.store_, "lstm.fwd", config.heads * d, H, rng);
      m.lstm_.backward = create_lstm_cell(m.store_, "lstm.bwd", config.heads * d, H, rng);
      m.readout_head_.weight = m.store_.create("out.weight", {1, H}, rng);
      m.readout_head_.bias = m.store_.create_zero("out.bias", {1});
      break;
    }
    case ModelKind::mlp: {
      m.mlp_hidden1_.weight = m.store_.create("mlp.h1.weight", {kMlpHidden1, L * model::kEvents}, rng);
      m.mlp_hidden1_.bias = m.store_.create_zero("mlp.h1.bias", {kMlpHidden1});
      m.mlp_hidden2_.weight = m.store_.create("mlp.h2.weight", {kMlpHidden2, kMlpHidden1}, rng);
      m.mlp_hidden2_.bias = m.store_.create_zero("mlp.h2.bias", {kMlpHidden2});
      m.readout_head_.weight = m.store_.create("out.weight", {1, kMlpHidden2}, rng);
      m.readout_head_.bias = m.store_.create_zero("out.bias", {1});
      break;
    }
    case ModelKind::dense_lstm: {
      m.step_embedding_.weight = m.store_.create("embed_dense.weight", {d, model::kEvents}, rng);
      m.step_embedding_.bias = m.store_.create_zero("embed_dense.bias", {d});
      m.lstm_.forward = create_lstm_cell(m.store_, "lstm.fwd", d, H, rng);
      m.lstm_.backward = create_lstm_cell(m.store_, "lstm.bwd", d, H, rng);
      m.readout_head_.weight = m.store_.create("out.weight", {1, H}, rng);
      m.readout_head_.bias = m.store_.create_zero("out.bias", {1});
      break;
    }
  }
  return m;
}

SepsisModel SepsisModel::from_store(const ModelConfig& config, nc::ParamStore store) {
  config.validate();
  SepsisModel m;
  m.config_ = config;
  m.store_ = std::move(store);
  m.bind();
  return m;
}

void SepsisModel::bind() {
  const int H = config_.hidden;
  switch (config_.model_kind) {
    case ModelKind::hea_lstm:
      tables_ = tables_from_store(store_);
      heads_ = heads_from_store(store_, config_.heads);
      lstm_.forward = bind_lstm_cell(store_, "lstm.fwd", H);
      lstm_.backward = bind_lstm_cell(store_, "lstm.bwd", H);
      break;
    case ModelKind::mlp:
      mlp_hidden1_.weight = store_.get("mlp.h1.weight");
      mlp_hidden1_.bias = store_.get("mlp.h1.bias");
      mlp_hidden2_.weight = store_.get("mlp.h2.weight");
      mlp_hidden2_.bias = store_.get("mlp.h2.bias");
      break;
    case ModelKind::dense_lstm:
      step_embedding_.weight = store_.get("embed_dense.weight");
      step_embedding_.bias = store_.get("embed_dense.bias");
      lstm_.forward = bind_lstm_cell(store_, "lstm.fwd", H);
      lstm_.backward = bind_lstm_cell(store_, "lstm.bwd", H);
      break;
  }
  readout_head_.weight = store_.get("out.weight");
  readout_head_.bias = store_.get("out.bias");
}

namespace {

// Raw per-hour input for the baselines: masked numeric values, categorical
// variables as their raw 0/1 value. A missing categorical becomes
// `missing_cat` (0 for the MLP, 0.5 for the dense embedding).
std::vector<double> raw_step_input(const prep::WindowSample& w, int t, double missing_cat) {
  std::vector<double> x(model::kEvents, 0.0);
  for (int j = 0; j < psv::kNumericVars; ++j)
    if (w.observed(t, j)) x[static_cast<std::size_t>(j)] = w.value(t, j);
  for (int c = 0; c < psv::kCategoricalVars; ++c) {
    const int idx = w.category(t, c);
    x[static_cast<std::size_t>(psv::kNumericVars + c)] =
        idx == prep::kEmptyCategory ? missing_cat : static_cast<double>(idx % 2);
  }
  return x;
}

}  // namespace

Tensor SepsisModel::window_logit(const prep::WindowSample& window) const {
  require(window.window_hours == config_.window_hours, ErrorKind::contract,
          "window_logit: window length does not match the model configuration");
  const int L = window.window_hours;

  switch (config_.model_kind) {
    case ModelKind::hea_lstm: {
      std::vector<Tensor> sequence = aggregate_window(window, tables_, heads_);
      Tensor readout = bilstm_readout(sequence, lstm_);
      return dense(readout, readout_head_);
    }
    case ModelKind::mlp: {
      std::vector<double> flat;
      flat.reserve(static_cast<std::size_t>(L) * model::kEvents);
      for (int t = 0; t < L; ++t) {
        auto x = raw_step_input(window, t, 0.0);
        flat.insert(flat.end(), x.begin(), x.end());
      }
      Tensor input = Tensor::from_values({L * model::kEvents}, std::move(flat));
      Tensor a1 = nc::tanh(dense(input, mlp_hidden1_));
      Tensor a2 = nc::tanh(dense(a1, mlp_hidden2_));
      return dense(a2, readout_head_);
    }
    case ModelKind::dense_lstm: {
      std::vector<Tensor> sequence;
      sequence.reserve(static_cast<std::size_t>(L));
      for (int t = 0; t < L; ++t) {
        Tensor x = Tensor::from_values({model::kEvents}, raw_step_input(window, t, 0.5));
        sequence.push_back(nc::tanh(dense(x, step_embedding_)));
      }
      Tensor readout = bilstm_readout(sequence, lstm_);
      return dense(readout, readout_head_);
    }
  }
  raise(ErrorKind::internal, "window_logit: unknown model kind");
}

Tensor SepsisModel::window_prob(const prep::WindowSample& window) const {
  return nc::sigmoid(window_logit(window));
}

PredictionOutput SepsisModel::predict(const prep::WindowSample& window) const {
  require(nc::Tape::active() == nullptr, ErrorKind::contract,
          "predict: inference must run outside a tape");
  PredictionOutput out;
  Tensor logit = window_logit(window);
  out.logit = logit.data()[0];
  out.prob = nc::sigmoid(logit).data()[0];
  return out;
}

}  // namespace heasep::model
