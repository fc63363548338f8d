#include "sta/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "sta/error.hpp"
#include "sta/model_io.hpp"

namespace sta {
namespace {

std::vector<std::size_t> shuffled(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[static_cast<std::size_t>(rng.below(i))]);
  }
  return order;
}

struct Totals {
  double loss = 0.0;
  std::size_t violations = 0;
  std::size_t pairs = 0;
};

void run_batch(ModelParams& params, Edge edge, const TripleStore& store,
               std::span<const std::size_t> batch, const TrainConfig& config, Rng& rng, int epoch,
               const TrainHooks& hooks, bool audit, Totals& totals) {
  if (hooks.before_batch) hooks.before_batch(params);
  BatchTrace trace{epoch, edge, {}};
  trace.pairs.reserve(batch.size() * static_cast<std::size_t>(config.negatives));
  std::vector<Triple> touched;
  touched.reserve(2 * batch.size() * static_cast<std::size_t>(config.negatives));

  Gradient grad;
  double batch_loss = 0.0;
  for (std::size_t idx : batch) {
    const Triple& pos = store.triples()[idx];
    for (int n = 0; n < config.negatives; ++n) {
      const NegativeSample neg = sample_negative(pos, store, config.sampling, rng);
      const PairOutcome out = accumulate_pair(params, edge, pos, neg.triple, config.margin, grad);
      batch_loss += out.loss;
      if (out.active) ++totals.violations;
      trace.pairs.push_back({pos, neg.triple, out.loss, neg.capped});
      touched.push_back(pos);
      touched.push_back(neg.triple);
    }
  }
  if (!std::isfinite(batch_loss)) {
    throw DivergenceError("non-finite loss in epoch " + std::to_string(epoch) +
                          "; the learning rate is probably too large");
  }
  totals.loss += batch_loss;
  totals.pairs += trace.pairs.size();

  apply_gradient(params, grad, config.learning_rate);
  project_constraints(params, edge, touched);
  if (audit) {
    const auto a = audit_constraints(params, edge, touched);
    if (!a.holds(1e-9)) {
      throw Error("norm constraint violated after a batch in epoch " + std::to_string(epoch));
    }
  }
  if (hooks.after_batch) hooks.after_batch(trace, params);
}

/// Interleaves check-in and content batches: T0, W0, T1, W1, ...
EpochStats joint_epoch(ModelParams& params, const TripleStore& checkins, const TripleStore* content,
                       const TrainConfig& config, Rng& rng_checkins, Rng* rng_content, int epoch,
                       const TrainHooks& hooks, bool audit) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t b = config.batch_size;
  const auto order_t = shuffled(checkins.size(), rng_checkins);
  std::vector<std::size_t> order_w;
  if (content != nullptr && rng_content != nullptr) order_w = shuffled(content->size(), *rng_content);
  const std::size_t nt = (order_t.size() + b - 1) / b;
  const std::size_t nw = (order_w.size() + b - 1) / b;

  auto slice = [b](const std::vector<std::size_t>& order, std::size_t i) {
    const std::size_t lo = i * b;
    return std::span<const std::size_t>(order).subspan(lo, std::min(b, order.size() - lo));
  };

  Totals totals;
  for (std::size_t i = 0; i < std::max(nt, nw); ++i) {
    if (i < nt) {
      run_batch(params, Edge::kCheckIn, checkins, slice(order_t, i), config, rng_checkins, epoch,
                hooks, audit, totals);
    }
    if (i < nw) {
      run_batch(params, Edge::kContent, *content, slice(order_w, i), config, *rng_content, epoch,
                hooks, audit, totals);
    }
  }
  EpochStats stats;
  stats.epoch = epoch;
  stats.pairs = totals.pairs;
  stats.violations = totals.violations;
  stats.mean_loss = totals.pairs > 0 ? totals.loss / static_cast<double>(totals.pairs) : 0.0;
  stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return stats;
}

void write_checkpoint(const ModelParams& params, int next_epoch, const TrainOptions& options) {
  static const Vocab kEmpty;
  save_model(options.checkpoint_path, params, options.vocab ? *options.vocab : kEmpty);
  auto state = options.checkpoint_path;
  state += ".state";
  save_state(state, params, next_epoch);
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be positive");
  }
  if (!(margin >= 0.0)) throw ConfigError("margin must be non-negative");
  if (batch_size < 1) throw ConfigError("batch size must be at least 1");
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (negatives < 1) throw ConfigError("negatives per positive must be at least 1");
  if (dim < 1 || rel_dim < 1) throw ConfigError("dimensions must be at least 1");
  if (variant != Variant::kTransR && dim != rel_dim) {
    throw ConfigError(std::string(to_string(variant)) + " requires d = m");
  }
}

EpochStats train_epoch(ModelParams& params, const TripleStore& store, const TrainConfig& config,
                       Rng& rng, const TrainHooks& hooks) {
  if (store.empty()) throw DataError("no training triples");
  return joint_epoch(params, store, nullptr, config, rng, nullptr, 1, hooks, false);
}

void write_log_line(std::ostream& out, const EpochStats& stats) {
  nlohmann::ordered_json line;
  line["epoch"] = stats.epoch;
  line["mean_loss"] = stats.mean_loss;
  line["violations"] = stats.violations;
  line["seconds"] = stats.seconds;
  out << line.dump() << '\n';
}

TrainResult run_training(ModelParams params, int first_epoch, const TripleStore& checkins,
                         const TripleStore* content, const TrainConfig& config,
                         const TrainOptions& options) {
  config.validate();
  if (checkins.empty()) throw DataError("no training triples");
  if (options.checkpoint_every < 1) throw ConfigError("checkpoint cadence must be at least 1");

  TrainResult result;
  for (int e = first_epoch; e < config.epochs; ++e) {
    Rng rng_t(derive_seed(config.seed, "epoch", static_cast<std::uint64_t>(e)));
    Rng rng_w(derive_seed(config.seed, "epoch.content", static_cast<std::uint64_t>(e)));
    const EpochStats stats = joint_epoch(params, checkins, content, config, rng_t, &rng_w, e + 1,
                                         options.hooks, options.audit);
    result.report.epochs.push_back(stats);
    if (options.log != nullptr) {
      write_log_line(*options.log, stats);
      options.log->flush();
    }
    const bool last = e + 1 == config.epochs;
    if (!options.checkpoint_path.empty() && ((e + 1) % options.checkpoint_every == 0 || last)) {
      write_checkpoint(params, e + 1, options);
    }
  }
  result.params = std::move(params);
  return result;
}

TrainResult train(const TripleStore& store, const TrainConfig& config, const TrainOptions& options) {
  config.validate();
  if (store.empty()) throw DataError("no training triples");
  ModelShape shape{store.num_heads(), store.num_tails(), store.num_relations(), 0,
                   config.dim,        config.rel_dim,    config.variant};
  return run_training(init_params(shape, config.seed), 0, store, nullptr, config, options);
}

TrainResult resume_training(const std::filesystem::path& state_path, const TripleStore& store,
                            const TripleStore* content, const TrainConfig& config,
                            const TrainOptions& options) {
  TrainingState state = load_state(state_path);
  if (state.params.variant != config.variant || state.params.dim != config.dim ||
      state.params.rel_dim != config.rel_dim) {
    throw ConfigError("checkpoint does not match the configured variant or dimensions");
  }
  return run_training(std::move(state.params), state.next_epoch, store, content, config, options);
}

}  // namespace sta
