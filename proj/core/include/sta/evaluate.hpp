#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "sta/params.hpp"
#include "sta/vocab.hpp"

namespace sta {

inline constexpr std::array<int, 5> kDefaultKs = {1, 5, 10, 15, 20};

/// A held-out check-in turned into a query with its ground-truth POI. An
/// empty relation marks a query the model cannot answer.
struct LabeledQuery {
  Id user = 0;
  std::optional<Id> relation;
  Id truth = 0;
};

struct EvalReport {
  std::vector<int> ks;
  std::vector<double> accuracy;  // parallel to ks
  std::size_t queries = 0;       // all queries, answerable or not
  std::size_t unanswerable = 0;

  double at(int k) const;
  /// {"acc": {"1": ..}, "queries": n, "unanswerable": n}
  nlohmann::ordered_json to_json() const;
};

/// accuracy@k = share of answerable queries whose 1-based rank is <= k.
EvalReport accuracy_from_ranks(std::span<const std::size_t> ranks, std::span<const int> ks,
                               std::size_t unanswerable = 0);

/// Ranks every answerable query's ground truth among all POIs by the L1
/// distance to the translated query. Read-only on `params`. Throws
/// DataError on an empty query set.
EvalReport evaluate(const ModelParams& params, std::span<const LabeledQuery> queries,
                    std::span<const int> ks = kDefaultKs);

/// The 1-based rank of each answerable query, in input order (unanswerable
/// queries are skipped).
std::vector<std::size_t> truth_ranks(const ModelParams& params, std::span<const LabeledQuery> queries);

}  // namespace sta
