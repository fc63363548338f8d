#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sta/checkin.hpp"
#include "sta/discretize.hpp"
#include "sta/trainer.hpp"
#include "sta/vocab.hpp"

namespace sta {

/// Content tokens and region of every POI, indexed by POI id.
struct PoiContent {
  std::vector<std::vector<std::string>> words;  // sorted, unique, lowercase
  std::vector<int> region;
};

/// Collects the union of tokens each POI carries across its check-ins; the
/// region is taken from the POI's first check-in. POIs never seen in
/// `checkins` get no words and region -1.
PoiContent collect_poi_content(std::span<const CheckIn> checkins, const Vocab& vocab,
                               const Discretizer& disc);

struct ContentOptions {
  /// Ordered pairs kept per <word, location> pattern; larger pair sets are
  /// subsampled uniformly without replacement.
  std::size_t pair_budget = 50;
  std::uint64_t seed = 0;
};

/// POI -> POI triples (v, wl, s) for every pair of distinct POIs that share a
/// <word, region> pattern. Patterns held by a single POI are not added to
/// `content_vocab`. Throws DataError when no POI has any content token.
TripleStore build_content_triples(const PoiContent& content, Dictionary& content_vocab,
                                  const ContentOptions& options = {});

/// Joint objective: hinge terms over check-in triples plus hinge terms over
/// content triples, trained by alternating one check-in batch with one
/// content batch. POI embeddings are shared; content patterns get their own
/// embeddings and projections. An empty content store reproduces train().
TrainResult train_coldstart(const TripleStore& checkins, const TripleStore& content,
                            const TrainConfig& config, const TrainOptions& options = {});

}  // namespace sta
