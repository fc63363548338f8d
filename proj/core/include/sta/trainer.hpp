#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <vector>

#include "sta/params.hpp"
#include "sta/rng.hpp"
#include "sta/sampler.hpp"
#include "sta/score.hpp"
#include "sta/vocab.hpp"

namespace sta {

struct TrainConfig {
  double learning_rate = 0.0001;
  double margin = 2.0;
  std::size_t batch_size = 4800;
  int epochs = 1000;
  std::uint64_t seed = 0;
  Variant variant = Variant::kTransR;
  int dim = 100;
  int rel_dim = 100;
  Sampling sampling = Sampling::kBernoulli;
  int negatives = 1;  // corrupted triples per positive

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

struct EpochStats {
  int epoch = 0;  // 1-based
  double mean_loss = 0.0;
  std::size_t violations = 0;  // pairs with a positive hinge
  std::size_t pairs = 0;
  double seconds = 0.0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
};

struct SampledPair {
  Triple positive;
  Triple negative;
  double loss = 0.0;
  bool capped = false;
};

/// Everything one mini-batch did, for replay and auditing.
struct BatchTrace {
  int epoch = 0;
  Edge edge = Edge::kCheckIn;
  std::vector<SampledPair> pairs;
};

struct TrainHooks {
  /// Called with the parameters the batch's gradient is computed against.
  std::function<void(const ModelParams&)> before_batch;
  /// Called after the update and constraint projection.
  std::function<void(const BatchTrace&, const ModelParams&)> after_batch;
};

struct TrainOptions {
  /// Model checkpoint path; empty disables checkpointing. A full-precision
  /// resume state is written next to it with a ".state" suffix.
  std::filesystem::path checkpoint_path;
  int checkpoint_every = 100;
  /// Vocabulary embedded in checkpoints.
  const Vocab* vocab = nullptr;
  /// JSON-lines training log sink.
  std::ostream* log = nullptr;
  TrainHooks hooks;
  /// Throw if any norm constraint is violated after a batch.
  bool audit = false;
};

struct TrainResult {
  ModelParams params;
  TrainReport report;
};

/// One pass: shuffle, split into batches of config.batch_size, sample
/// negatives, accumulate hinge gradients per batch, step by
/// -learning_rate * gradient, then project constraints. Throws
/// DivergenceError on a non-finite loss.
EpochStats train_epoch(ModelParams& params, const TripleStore& store, const TrainConfig& config,
                       Rng& rng, const TrainHooks& hooks = {});

/// Initialises parameters from `config.seed` and runs config.epochs epochs.
/// The parameter shape comes from the store's id bounds.
TrainResult train(const TripleStore& store, const TrainConfig& config,
                  const TrainOptions& options = {});

/// Continues from a checkpointed state until config.epochs. Pass the
/// content store when resuming a joint (cold-start) run.
TrainResult resume_training(const std::filesystem::path& state_path, const TripleStore& store,
                            const TripleStore* content, const TrainConfig& config,
                            const TrainOptions& options = {});

/// Shared epoch loop for the check-in objective and the joint objective with
/// content triples (`content` may be null). Epoch e draws from streams
/// derived from (seed, e), so a resumed run replays the same schedule.
TrainResult run_training(ModelParams params, int first_epoch, const TripleStore& checkins,
                         const TripleStore* content, const TrainConfig& config,
                         const TrainOptions& options);

/// Writes one log line: {"epoch":..,"mean_loss":..,"violations":..,"seconds":..}.
void write_log_line(std::ostream& out, const EpochStats& stats);

}  // namespace sta
