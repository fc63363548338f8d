#include "sta/sampler.hpp"

#include "sta/error.hpp"

namespace sta {

std::string_view to_string(Sampling s) { return s == Sampling::kBernoulli ? "bern" : "unif"; }

Sampling parse_sampling(std::string_view name) {
  if (name == "bern" || name == "bernoulli") return Sampling::kBernoulli;
  if (name == "unif" || name == "uniform") return Sampling::kUniform;
  throw ConfigError("unknown negative sampling mode: '" + std::string(name) + "'");
}

double head_probability(const TripleStore& store, Id r, Sampling mode) {
  if (mode == Sampling::kUniform) return 0.5;
  const double tph = store.tph(r);
  const double hpt = store.hpt(r);
  if (tph + hpt <= 0.0) return 0.5;
  return tph / (tph + hpt);
}

NegativeSample sample_negative(const Triple& positive, const TripleStore& store, Sampling mode,
                               Rng& rng, int max_attempts) {
  const bool heads_ok = store.num_heads() >= 2;
  const bool tails_ok = store.num_tails() >= 2;
  if (!heads_ok && !tails_ok) throw DataError("cannot corrupt triples: both vocabularies have one entry");
  const double p_head = head_probability(store, positive.relation, mode);

  bool head = rng.bernoulli(p_head);
  if (head && !heads_ok) head = false;
  if (!head && !tails_ok) head = true;

  NegativeSample out;
  out.head_replaced = head;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    Triple candidate = positive;
    if (head) {
      candidate.head = static_cast<Id>(rng.below(static_cast<std::uint64_t>(store.num_heads())));
    } else {
      candidate.tail = static_cast<Id>(rng.below(static_cast<std::uint64_t>(store.num_tails())));
    }
    out.triple = candidate;
    out.attempts = attempt;
    if (!store.contains(candidate)) return out;
  }
  out.capped = true;
  return out;
}

}  // namespace sta
