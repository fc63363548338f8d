#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sta {

/// Deterministic random source. Draws are built directly from the raw
/// mt19937_64 stream so sequences do not depend on the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller (the spare value is discarded).
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// Mixes a root seed with a component name, so that every consumer of
/// randomness (k-means, splits, training epochs, ...) gets an independent
/// reproducible stream.
std::uint64_t derive_seed(std::uint64_t root, std::string_view component);
std::uint64_t derive_seed(std::uint64_t root, std::string_view component,
                          std::uint64_t index);

}  // namespace sta
