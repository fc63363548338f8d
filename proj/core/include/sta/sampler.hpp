#pragma once

#include <string_view>

#include "sta/rng.hpp"
#include "sta/vocab.hpp"

namespace sta {

/// "bern": corrupt the head with probability tph / (tph + hpt) of the
/// triple's relation. "unif": fair coin.
enum class Sampling { kBernoulli, kUniform };

std::string_view to_string(Sampling s);
Sampling parse_sampling(std::string_view name);

struct NegativeSample {
  Triple triple;
  bool head_replaced = false;
  int attempts = 0;
  /// True when every attempt hit a known triple and the last candidate was
  /// kept anyway.
  bool capped = false;
};

/// Probability that sample_negative corrupts the head of a triple with
/// relation r.
double head_probability(const TripleStore& store, Id r, Sampling mode);

/// Picks the side to corrupt once, then replaces that side of `positive`
/// with a uniformly random id, resampling while the candidate is a known
/// training triple, up to `max_attempts` draws.
NegativeSample sample_negative(const Triple& positive, const TripleStore& store, Sampling mode,
                               Rng& rng, int max_attempts = 100);

}  // namespace sta
