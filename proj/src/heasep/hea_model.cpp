#include "heasep/hea_model.hpp"

#include <cmath>
#include <limits>

namespace heasep::model {

using nc::Tensor;

EmbeddingTables create_embedding_tables(nc::ParamStore& store, int dim, Rng& rng) {
  EmbeddingTables t;
  t.event_vectors = store.create("embed.event_vectors", {psv::kNumericVars, dim}, rng);
  t.value_vectors = store.create("embed.value_vectors", {psv::kNumericVars, dim}, rng);
  t.category_table = store.create("embed.category_table", {kCategoryCount, dim}, rng);
  return t;
}

std::vector<HeadParams> create_heads(nc::ParamStore& store, int heads, int dim, Rng& rng) {
  require(heads >= 1, ErrorKind::contract, "create_heads: at least one head required");
  std::vector<HeadParams> out;
  out.reserve(static_cast<std::size_t>(heads));
  for (int i = 0; i < heads; ++i) {
    const std::string prefix = "head." + std::to_string(i) + ".";
    HeadParams h;
    h.key_transform = store.create(prefix + "key_transform", {dim, dim}, rng);
    h.value_transform = store.create(prefix + "value_transform", {dim, dim}, rng);
    h.mask_vector = store.create(prefix + "mask_vector", {dim}, rng);
    out.push_back(std::move(h));
  }
  return out;
}

EmbeddingTables tables_from_store(const nc::ParamStore& store) {
  EmbeddingTables t;
  t.event_vectors = store.get("embed.event_vectors");
  t.value_vectors = store.get("embed.value_vectors");
  t.category_table = store.get("embed.category_table");
  return t;
}

std::vector<HeadParams> heads_from_store(const nc::ParamStore& store, int heads) {
  std::vector<HeadParams> out;
  out.reserve(static_cast<std::size_t>(heads));
  for (int i = 0; i < heads; ++i) {
    const std::string prefix = "head." + std::to_string(i) + ".";
    HeadParams h;
    h.key_transform = store.get(prefix + "key_transform");
    h.value_transform = store.get(prefix + "value_transform");
    h.mask_vector = store.get(prefix + "mask_vector");
    out.push_back(std::move(h));
  }
  return out;
}

StepEmbedding embed_step(std::span<const double> values_t,
                         std::span<const std::uint8_t> obs_mask_t,
                         std::span<const std::int8_t> cat_idx_t,
                         const EmbeddingTables& tables) {
  require(values_t.size() == psv::kNumericVars && obs_mask_t.size() == psv::kNumericVars &&
              cat_idx_t.size() == psv::kCategoricalVars,
          ErrorKind::contract, "embed_step: bad input widths");

  std::array<int, psv::kCategoricalVars> cats{};
  for (int c = 0; c < psv::kCategoricalVars; ++c) {
    const int idx = cat_idx_t[static_cast<std::size_t>(c)];
    require(idx >= 0 && idx < kCategoryCount, ErrorKind::contract,
            "embed_step: categorical index out of range");
    cats[static_cast<std::size_t>(c)] = idx;
  }
  for (std::size_t j = 0; j < values_t.size(); ++j) {
    require(std::isfinite(values_t[j]), ErrorKind::contract,
            "embed_step: non-finite input value");
  }

  StepEmbedding step;
  for (int j = 0; j < psv::kNumericVars; ++j)
    step.att_mask[static_cast<std::size_t>(j)] = obs_mask_t[static_cast<std::size_t>(j)];
  for (int j = psv::kNumericVars; j < kEvents; ++j)
    step.att_mask[static_cast<std::size_t>(j)] = 1;

  Tensor x = Tensor::from_values({psv::kNumericVars},
                                 std::vector<double>(values_t.begin(), values_t.end()));
  Tensor numeric = nc::add(tables.event_vectors, nc::row_scale(tables.value_vectors, x));
  Tensor categorical = nc::lookup_rows(tables.category_table, cats);

  const std::array<Tensor, 2> embed_parts = {numeric, categorical};
  Tensor stacked = nc::concat(embed_parts);
  step.embedded = nc::zero_rows(stacked, step.att_mask);

  const std::array<Tensor, 2> key_parts = {tables.event_vectors, categorical};
  step.keys = nc::concat(key_parts);
  return step;
}

Tensor attention_weights(const StepEmbedding& step, const HeadParams& head) {
  bool any = false;
  for (auto m : step.att_mask) any = any || (m != 0);
  require(any, ErrorKind::contract, "attend_head: all events masked");

  Tensor query = nc::matvec_t(head.key_transform, head.mask_vector);  // W_k^T m
  Tensor scores = nc::matvec(step.keys, query);                       // (W_k k_j) . m
  Tensor masked = nc::mask_fill(scores, step.att_mask,
                                -std::numeric_limits<double>::infinity());
  return nc::softmax(masked);
}

Tensor attend_head(const StepEmbedding& step, const HeadParams& head) {
  Tensor weights = attention_weights(step, head);
  Tensor mixed = nc::matvec_t(step.embedded, weights);  // sum_j w_j E_t[j]
  return nc::matvec(head.value_transform, mixed);
}

Tensor aggregate_step(const StepEmbedding& step, std::span<const HeadParams> heads) {
  require(!heads.empty(), ErrorKind::contract, "aggregate_step: no heads");
  std::vector<Tensor> outputs;
  outputs.reserve(heads.size());
  for (const HeadParams& head : heads) outputs.push_back(attend_head(step, head));
  if (outputs.size() == 1) return outputs[0];
  return nc::concat(outputs);
}

std::vector<Tensor> aggregate_window(const prep::WindowSample& window,
                                     const EmbeddingTables& tables,
                                     std::span<const HeadParams> heads) {
  std::vector<Tensor> out;
  const int L = window.window_hours;
  out.reserve(static_cast<std::size_t>(L));
  for (int t = 0; t < L; ++t) {
    const std::size_t voff = static_cast<std::size_t>(t) * psv::kNumericVars;
    const std::size_t coff = static_cast<std::size_t>(t) * psv::kCategoricalVars;
    StepEmbedding step = embed_step(
        std::span<const double>(window.values.data() + voff, psv::kNumericVars),
        std::span<const std::uint8_t>(window.obs_mask.data() + voff, psv::kNumericVars),
        std::span<const std::int8_t>(window.cat_idx.data() + coff, psv::kCategoricalVars),
        tables);
    out.push_back(aggregate_step(step, heads));
  }
  return out;
}

}  // namespace heasep::model
