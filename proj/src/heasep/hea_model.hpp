#ifndef HEASEP_HEA_MODEL_HPP
#define HEASEP_HEA_MODEL_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "heasep/ops.hpp"
#include "heasep/params.hpp"
#include "heasep/preprocess.hpp"

namespace heasep::model {

inline constexpr int kEvents = 40;          // 37 numeric + 3 categorical per hour
inline constexpr int kCategoryCount = 7;    // 6 clinical categories + empty

// Learned embedding tables: numerical event vectors (37 x d), value vectors
// (37 x d) scaled by the observed value, and the categorical lookup (7 x d).
struct EmbeddingTables {
  nc::Tensor event_vectors;  // 37 x d
  nc::Tensor value_vectors;  // 37 x d
  nc::Tensor category_table; // 7 x d

  int dim() const { return event_vectors.cols(); }
};

// One aggregation head: key/value transforms plus the learned mask vector
// the events' scores are taken against.
struct HeadParams {
  nc::Tensor key_transform;   // d x d
  nc::Tensor value_transform; // d x d
  nc::Tensor mask_vector;     // d
};

// Per-timestep event embedding. Rows 0..36 are the numeric events (zeroed
// where unobserved), rows 37..39 the categorical events. Keys use the raw
// event vectors for numeric events and the looked-up embeddings for
// categorical ones, so they never depend on observed values.
struct StepEmbedding {
  nc::Tensor embedded;  // E_t: 40 x d
  nc::Tensor keys;      // K_t: 40 x d
  std::array<std::uint8_t, kEvents> att_mask{};  // 1 = participates in attention
};

EmbeddingTables create_embedding_tables(nc::ParamStore& store, int dim, Rng& rng);
std::vector<HeadParams> create_heads(nc::ParamStore& store, int heads, int dim, Rng& rng);
EmbeddingTables tables_from_store(const nc::ParamStore& store);
std::vector<HeadParams> heads_from_store(const nc::ParamStore& store, int heads);

StepEmbedding embed_step(std::span<const double> values_t,
                         std::span<const std::uint8_t> obs_mask_t,
                         std::span<const std::int8_t> cat_idx_t,
                         const EmbeddingTables& tables);

// Attention weights for one head over the step's events: -inf fill on
// masked events, softmax across all 40. Exposed separately for tests.
nc::Tensor attention_weights(const StepEmbedding& step, const HeadParams& head);

// h_i = sum_j w_j * (W_v E_t[j]), computed as W_v (E_t^T w).
nc::Tensor attend_head(const StepEmbedding& step, const HeadParams& head);

// Concatenation of all head outputs, length M*d.
nc::Tensor aggregate_step(const StepEmbedding& step, std::span<const HeadParams> heads);

// One aggregated vector per window row; L vectors of length M*d.
std::vector<nc::Tensor> aggregate_window(const prep::WindowSample& window,
                                         const EmbeddingTables& tables,
                                         std::span<const HeadParams> heads);

}  // namespace heasep::model

#endif
