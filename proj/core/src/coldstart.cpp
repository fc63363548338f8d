#include "sta/coldstart.hpp"

#include <algorithm>
#include <unordered_map>

#include "sta/error.hpp"
#include "sta/split.hpp"

namespace sta {

PoiContent collect_poi_content(std::span<const CheckIn> checkins, const Vocab& vocab,
                               const Discretizer& disc) {
  const auto n = static_cast<std::size_t>(vocab.pois.size());
  PoiContent out;
  out.words.resize(n);
  out.region.assign(n, -1);
  for (const auto& c : checkins) {
    const auto id = vocab.pois.find(c.poi);
    if (!id) continue;
    const auto v = static_cast<std::size_t>(*id);
    if (out.region[v] < 0) out.region[v] = disc.region(c.poi, {c.lat, c.lon});
    for (const auto& w : c.words) out.words[v].push_back(lowercase(w));
  }
  for (auto& words : out.words) {
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
  }
  return out;
}

TripleStore build_content_triples(const PoiContent& content, Dictionary& content_vocab,
                                  const ContentOptions& options) {
  const bool any_words = std::any_of(content.words.begin(), content.words.end(),
                                     [](const auto& w) { return !w.empty(); });
  if (!any_words) {
    throw DataError(
        "no POI carries content tokens; the cold-start (STA-C) model is inapplicable to datasets "
        "without POI content");
  }

  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<Id>> holders;
  for (std::size_t v = 0; v < content.words.size(); ++v) {
    if (content.region[v] < 0) continue;
    for (const auto& w : content.words[v]) {
      std::string key = w + "@" + std::to_string(content.region[v]);
      auto [it, inserted] = holders.try_emplace(key);
      if (inserted) order.push_back(key);
      it->second.push_back(static_cast<Id>(v));
    }
  }

  Rng rng(options.seed);
  std::vector<Triple> triples;
  for (const auto& key : order) {
    const auto& pois = holders[key];
    const std::size_t p = pois.size();
    if (p < 2) continue;
    const Id wl = content_vocab.intern(key);
    const std::size_t total = p * (p - 1);
    auto emit = [&](std::size_t pair) {
      // Pair index -> (i, j), j != i.
      const std::size_t i = pair / (p - 1);
      std::size_t j = pair % (p - 1);
      if (j >= i) ++j;
      triples.push_back({pois[i], wl, pois[j]});
    };
    if (total <= options.pair_budget) {
      for (std::size_t k = 0; k < total; ++k) emit(k);
    } else {
      for (std::size_t k : choose_indices(total, options.pair_budget, rng)) emit(k);
    }
  }
  const auto n_pois = static_cast<Id>(content.words.size());
  return TripleStore(std::move(triples), n_pois, content_vocab.size(), n_pois);
}

TrainResult train_coldstart(const TripleStore& checkins, const TripleStore& content,
                            const TrainConfig& config, const TrainOptions& options) {
  config.validate();
  if (checkins.empty()) throw DataError("no training triples");
  if (!content.empty() && (content.num_heads() != checkins.num_tails() ||
                           content.num_tails() != checkins.num_tails())) {
    throw DataError("content triples must index the same POI vocabulary as check-in triples");
  }
  ModelShape shape{checkins.num_heads(), checkins.num_tails(), checkins.num_relations(),
                   content.num_relations(), config.dim, config.rel_dim, config.variant};
  return run_training(init_params(shape, config.seed), 0, checkins,
                      content.empty() ? nullptr : &content, config, options);
}

}  // namespace sta
