#ifndef HEASEP_CHECKPOINT_HPP
#define HEASEP_CHECKPOINT_HPP

#include <string>

#include "heasep/seq_model.hpp"
#include "heasep/trainer.hpp"

namespace heasep::harness {

// Self-describing checkpoint: a text header (format version, config,
// normalization stats, training metadata, tensor directory with
// names/shapes/offsets) followed by the parameters as little-endian f32
// blobs in directory order. save(load(x)) is byte-identical to x.
void save_checkpoint(const std::string& path, const model::SepsisModel& model,
                     const TrainMeta& meta);

model::SepsisModel load_checkpoint(const std::string& path, TrainMeta* meta_out = nullptr);

}  // namespace heasep::harness

#endif
