#pragma once

#include <filesystem>

#include "sta/params.hpp"
#include "sta/vocab.hpp"

namespace sta {

/// Model file layout (all little-endian):
///   "STA1"
///   int32 variant, d, m, |users|, |pois|, |patterns|, |content patterns|
///   float32 row-major arrays: users, pois, pattern embeddings, then pattern
///   projections (TransR, each d x m) or normals (TransH), then the same
///   for content patterns
///   vocab tables users, pois, patterns, content: uint32 count followed by
///   uint32 byte length + UTF-8 bytes per key
void save_model(const std::filesystem::path& path, const ModelParams& params, const Vocab& vocab);

struct LoadedModel {
  ModelParams params;
  Vocab vocab;
};

LoadedModel load_model(const std::filesystem::path& path);

/// Full-precision training state used to resume: "STS1", int32 next epoch,
/// the same header, then float64 arrays in model-file order. No vocab.
void save_state(const std::filesystem::path& path, const ModelParams& params, int next_epoch);

struct TrainingState {
  ModelParams params;
  int next_epoch = 0;
};

TrainingState load_state(const std::filesystem::path& path);

/// Rounds every parameter through float32, i.e. what a model file keeps.
ModelParams round_to_float(const ModelParams& params);

}  // namespace sta
