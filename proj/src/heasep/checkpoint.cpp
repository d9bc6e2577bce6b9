#include "heasep/checkpoint.hpp"

#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace heasep::harness {

namespace {

constexpr std::string_view kMagic = "heasep-checkpoint v1";

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, const char* what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc{} && ptr == s.data() + s.size(), ErrorKind::checkpoint,
          std::string("checkpoint: bad number in ") + what + ": '" + s + "'");
  return v;
}

std::int64_t parse_int(const std::string& s, const char* what) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc{} && ptr == s.data() + s.size(), ErrorKind::checkpoint,
          std::string("checkpoint: bad integer in ") + what + ": '" + s + "'");
  return v;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

void put_f32_le(std::string& out, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  out.push_back(static_cast<char>(bits & 0xff));
  out.push_back(static_cast<char>((bits >> 8) & 0xff));
  out.push_back(static_cast<char>((bits >> 16) & 0xff));
  out.push_back(static_cast<char>((bits >> 24) & 0xff));
}

float get_f32_le(const unsigned char* p) {
  std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                       (static_cast<std::uint32_t>(p[1]) << 8) |
                       (static_cast<std::uint32_t>(p[2]) << 16) |
                       (static_cast<std::uint32_t>(p[3]) << 24);
  float f;
  std::memcpy(&f, &bits, 4);
  return f;
}

}  // namespace

void save_checkpoint(const std::string& path, const model::SepsisModel& model,
                     const TrainMeta& meta) {
  std::string header;
  header += kMagic;
  header += '\n';
  {
    std::string config_text = serialize_config(model.config());
    std::size_t offset = 0;
    while (offset < config_text.size()) {
      std::size_t end = config_text.find('\n', offset);
      header += "config ";
      header += config_text.substr(offset, end - offset);
      header += '\n';
      offset = end + 1;
    }
  }
  const auto& norm = model.norm_stats();
  header += "norm_mean";
  for (double v : norm.mean) header += " " + fmt_double(v);
  header += "\nnorm_std";
  for (double v : norm.stddev) header += " " + fmt_double(v);
  header += "\nnorm_count";
  for (std::uint64_t v : norm.observed_count) header += " " + std::to_string(v);
  header += '\n';
  header += "meta epochs_run " + std::to_string(meta.epochs_run) + "\n";
  header += "meta final_train_loss " + fmt_double(meta.final_train_loss) + "\n";
  header += "meta skipped_steps " + std::to_string(meta.skipped_steps) + "\n";

  std::string blob;
  std::size_t offset_floats = 0;
  for (const auto& [name, tensor] : model.params().entries()) {
    header += "tensor " + name + " " + std::to_string(tensor.rank());
    for (int d : tensor.shape()) header += " " + std::to_string(d);
    header += " " + std::to_string(offset_floats) + "\n";
    for (std::size_t i = 0; i < tensor.size(); ++i)
      put_f32_le(blob, static_cast<float>(tensor.data()[i]));
    offset_floats += tensor.size();
  }
  header += "blob " + std::to_string(offset_floats) + "\n";

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorKind::io, "cannot write checkpoint: " + path);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!out) raise(ErrorKind::io, "checkpoint write failed: " + path);
}

model::SepsisModel load_checkpoint(const std::string& path, TrainMeta* meta_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::io, "cannot open checkpoint: " + path);

  std::string line;
  require(static_cast<bool>(std::getline(in, line)) && line == kMagic, ErrorKind::checkpoint,
          "checkpoint: bad magic or unsupported version in " + path);

  std::string config_text;
  prep::NormStats norm{};
  TrainMeta meta;
  struct TensorEntry {
    std::string name;
    std::vector<int> shape;
    std::size_t offset;
  };
  std::vector<TensorEntry> directory;
  std::size_t blob_floats = 0;
  bool saw_blob = false;

  while (std::getline(in, line)) {
    if (line.rfind("config ", 0) == 0) {
      config_text += line.substr(7);
      config_text += '\n';
    } else if (line.rfind("norm_mean", 0) == 0 || line.rfind("norm_std", 0) == 0 ||
               line.rfind("norm_count", 0) == 0) {
      auto toks = split_ws(line);
      require(toks.size() == 1 + norm.mean.size(), ErrorKind::checkpoint,
              "checkpoint: wrong " + toks[0] + " arity");
      for (std::size_t i = 1; i < toks.size(); ++i) {
        if (toks[0] == "norm_mean") norm.mean[i - 1] = parse_double(toks[i], "norm_mean");
        else if (toks[0] == "norm_std") norm.stddev[i - 1] = parse_double(toks[i], "norm_std");
        else norm.observed_count[i - 1] =
                 static_cast<std::uint64_t>(parse_int(toks[i], "norm_count"));
      }
    } else if (line.rfind("meta ", 0) == 0) {
      auto toks = split_ws(line);
      require(toks.size() == 3, ErrorKind::checkpoint, "checkpoint: bad meta line");
      if (toks[1] == "epochs_run") meta.epochs_run = static_cast<int>(parse_int(toks[2], "meta"));
      else if (toks[1] == "final_train_loss") meta.final_train_loss = parse_double(toks[2], "meta");
      else if (toks[1] == "skipped_steps")
        meta.skipped_steps = static_cast<std::size_t>(parse_int(toks[2], "meta"));
      else raise(ErrorKind::checkpoint, "checkpoint: unknown meta key " + toks[1]);
    } else if (line.rfind("tensor ", 0) == 0) {
      auto toks = split_ws(line);
      require(toks.size() >= 4, ErrorKind::checkpoint, "checkpoint: bad tensor line");
      TensorEntry e;
      e.name = toks[1];
      const int rank = static_cast<int>(parse_int(toks[2], "tensor rank"));
      require(rank >= 0 && rank <= 2 && toks.size() == 4 + static_cast<std::size_t>(rank),
              ErrorKind::checkpoint, "checkpoint: bad tensor directory entry for " + e.name);
      for (int d = 0; d < rank; ++d)
        e.shape.push_back(static_cast<int>(parse_int(toks[3 + static_cast<std::size_t>(d)], "tensor dim")));
      e.offset = static_cast<std::size_t>(parse_int(toks.back(), "tensor offset"));
      directory.push_back(std::move(e));
    } else if (line.rfind("blob ", 0) == 0) {
      blob_floats = static_cast<std::size_t>(parse_int(line.substr(5), "blob"));
      saw_blob = true;
      break;
    } else {
      raise(ErrorKind::checkpoint, "checkpoint: unrecognized header line: " + line);
    }
  }
  require(saw_blob, ErrorKind::checkpoint, "checkpoint: missing blob marker");

  std::vector<unsigned char> blob(blob_floats * 4);
  in.read(reinterpret_cast<char*>(blob.data()), static_cast<std::streamsize>(blob.size()));
  require(static_cast<std::size_t>(in.gcount()) == blob.size(), ErrorKind::checkpoint,
          "checkpoint: truncated blob");

  ModelConfig config = parse_config_text(config_text);

  // Rebuild the architecture from the config, then fill values by name.
  Rng scratch_rng(0);
  model::SepsisModel model = model::SepsisModel::create(config, scratch_rng);
  model.norm_stats() = norm;

  const auto& entries = model.params().entries();
  require(entries.size() == directory.size(), ErrorKind::checkpoint,
          "checkpoint: tensor count does not match the configured architecture");
  std::size_t expected_offset = 0;
  for (std::size_t i = 0; i < directory.size(); ++i) {
    const auto& e = directory[i];
    const auto& [name, tensor] = entries[i];
    require(e.name == name, ErrorKind::checkpoint,
            "checkpoint: tensor '" + e.name + "' does not match expected '" + name + "'");
    require(e.shape == tensor.shape(), ErrorKind::checkpoint,
            "checkpoint: shape mismatch for tensor " + e.name);
    require(e.offset == expected_offset, ErrorKind::checkpoint,
            "checkpoint: bad offset for tensor " + e.name);
    nc::Tensor t = tensor;
    for (std::size_t j = 0; j < t.size(); ++j)
      t.data()[j] = static_cast<double>(get_f32_le(blob.data() + (e.offset + j) * 4));
    expected_offset += t.size();
  }
  require(expected_offset == blob_floats, ErrorKind::checkpoint,
          "checkpoint: blob size disagrees with tensor directory");

  if (meta_out) *meta_out = meta;
  return model;
}

}  // namespace heasep::harness
