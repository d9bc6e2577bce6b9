#include "heasep/config.hpp"

#include <charconv>
#include <cstdio>

#include "heasep/error.hpp"
#include "heasep/psv.hpp"

namespace heasep::harness {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::hea_lstm: return "hea_lstm";
    case ModelKind::mlp: return "mlp";
    case ModelKind::dense_lstm: return "dense_lstm";
  }
  raise(ErrorKind::internal, "unknown model kind");
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "hea_lstm") return ModelKind::hea_lstm;
  if (s == "mlp") return ModelKind::mlp;
  if (s == "dense_lstm") return ModelKind::dense_lstm;
  raise(ErrorKind::config, "unknown model kind '" + s + "' (hea_lstm|mlp|dense_lstm)");
}

void ModelConfig::validate() const {
  require(window_hours >= 1, ErrorKind::config, "window_hours must be >= 1");
  require(embed_dim >= 1, ErrorKind::config, "embed_dim must be >= 1");
  require(heads >= 1, ErrorKind::config, "heads must be >= 1");
  require(hidden >= 1, ErrorKind::config, "hidden must be >= 1");
  require(learning_rate > 0.0, ErrorKind::config, "learning_rate must be positive");
  require(batch_size >= 1, ErrorKind::config, "batch_size must be >= 1");
  require(epochs >= 0, ErrorKind::config, "epochs must be >= 0");
  require(positive_fraction >= 0.0 && positive_fraction < 1.0, ErrorKind::config,
          "positive_fraction must be in [0, 1)");
  require(threshold >= 0.0 && threshold <= 1.0, ErrorKind::config,
          "threshold must be in [0, 1]");
}

namespace {

double parse_double_value(const std::string& key, const std::string& value) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  require(ec == std::errc{} && ptr == value.data() + value.size(), ErrorKind::config,
          "config: bad numeric value for " + key + ": '" + value + "'");
  return v;
}

std::int64_t parse_int_value(const std::string& key, const std::string& value) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  require(ec == std::errc{} && ptr == value.data() + value.size(), ErrorKind::config,
          "config: bad integer value for " + key + ": '" + value + "'");
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ModelConfig parse_config_text(const std::string& text, ModelConfig base) {
  ModelConfig config = base;
  std::size_t offset = 0;
  std::size_t line_no = 0;
  while (offset <= text.size()) {
    std::size_t end = text.find('\n', offset);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(offset, end - offset);
    offset = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // strip comments and whitespace
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) {
      if (end == text.size()) break;
      continue;
    }
    auto last = line.find_last_not_of(" \t");
    line = line.substr(first, last - first + 1);

    std::size_t eq = line.find('=');
    require(eq != std::string::npos, ErrorKind::config,
            "config line " + std::to_string(line_no) + ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    while (!value.empty() && (value.front() == ' ' || value.front() == '\t')) value.erase(0, 1);

    if (key == "model") config.model_kind = model_kind_from_string(value);
    else if (key == "window_hours") config.window_hours = static_cast<int>(parse_int_value(key, value));
    else if (key == "embed_dim") config.embed_dim = static_cast<int>(parse_int_value(key, value));
    else if (key == "heads") config.heads = static_cast<int>(parse_int_value(key, value));
    else if (key == "hidden") config.hidden = static_cast<int>(parse_int_value(key, value));
    else if (key == "learning_rate") config.learning_rate = parse_double_value(key, value);
    else if (key == "batch_size") config.batch_size = static_cast<int>(parse_int_value(key, value));
    else if (key == "epochs") config.epochs = static_cast<int>(parse_int_value(key, value));
    else if (key == "seed") config.seed = static_cast<std::uint64_t>(parse_int_value(key, value));
    else if (key == "positive_fraction") config.positive_fraction = parse_double_value(key, value);
    else if (key == "threshold") config.threshold = parse_double_value(key, value);
    else if (key == "adam_beta1") config.adam_beta1 = parse_double_value(key, value);
    else if (key == "adam_beta2") config.adam_beta2 = parse_double_value(key, value);
    else if (key == "adam_epsilon") config.adam_epsilon = parse_double_value(key, value);
    else raise(ErrorKind::config, "config: unknown key '" + key + "'");

    if (end == text.size()) break;
  }
  config.validate();
  return config;
}

ModelConfig load_config_file(const std::string& path, ModelConfig base) {
  return parse_config_text(psv::read_text_file(path), base);
}

std::string serialize_config(const ModelConfig& config) {
  std::string out;
  out += "model=" + to_string(config.model_kind) + "\n";
  out += "window_hours=" + std::to_string(config.window_hours) + "\n";
  out += "embed_dim=" + std::to_string(config.embed_dim) + "\n";
  out += "heads=" + std::to_string(config.heads) + "\n";
  out += "hidden=" + std::to_string(config.hidden) + "\n";
  out += "learning_rate=" + format_double(config.learning_rate) + "\n";
  out += "batch_size=" + std::to_string(config.batch_size) + "\n";
  out += "epochs=" + std::to_string(config.epochs) + "\n";
  out += "seed=" + std::to_string(config.seed) + "\n";
  out += "positive_fraction=" + format_double(config.positive_fraction) + "\n";
  out += "threshold=" + format_double(config.threshold) + "\n";
  out += "adam_beta1=" + format_double(config.adam_beta1) + "\n";
  out += "adam_beta2=" + format_double(config.adam_beta2) + "\n";
  out += "adam_epsilon=" + format_double(config.adam_epsilon) + "\n";
  return out;
}

}  // namespace heasep::harness
