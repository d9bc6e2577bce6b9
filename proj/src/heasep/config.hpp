#ifndef HEASEP_CONFIG_HPP
#define HEASEP_CONFIG_HPP

#include <cstdint>
#include <string>

namespace heasep::harness {

enum class ModelKind { hea_lstm, mlp, dense_lstm };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

// Every hyperparameter of a run. Serialized verbatim into each checkpoint
// and report so results are reproducible from their artifacts alone.
struct ModelConfig {
  ModelKind model_kind = ModelKind::hea_lstm;
  int window_hours = 24;   // L
  int embed_dim = 16;      // d
  int heads = 16;          // M
  int hidden = 64;         // H
  double learning_rate = 1e-3;
  int batch_size = 256;
  int epochs = 10;
  std::uint64_t seed = 42;
  double positive_fraction = 0.25;  // training sampler draw rate for positives
  double threshold = 0.5;           // filled in after validation
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  void validate() const;  // throws ErrorKind::config
};

// Flat key=value text, '#' comments. Unknown keys are errors.
ModelConfig parse_config_text(const std::string& text, ModelConfig base = ModelConfig{});
ModelConfig load_config_file(const std::string& path, ModelConfig base = ModelConfig{});
std::string serialize_config(const ModelConfig& config);

}  // namespace heasep::harness

#endif
