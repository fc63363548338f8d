#include "sta/evaluate.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "sta/error.hpp"
#include "sta/recommend.hpp"

namespace sta {

double EvalReport::at(int k) const {
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] == k) return accuracy[i];
  }
  throw std::out_of_range("accuracy@" + std::to_string(k) + " was not computed");
}

nlohmann::ordered_json EvalReport::to_json() const {
  nlohmann::ordered_json acc = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < ks.size(); ++i) acc[std::to_string(ks[i])] = accuracy[i];
  nlohmann::ordered_json out;
  out["acc"] = std::move(acc);
  out["queries"] = queries;
  out["unanswerable"] = unanswerable;
  return out;
}

EvalReport accuracy_from_ranks(std::span<const std::size_t> ranks, std::span<const int> ks,
                               std::size_t unanswerable) {
  EvalReport report;
  report.ks.assign(ks.begin(), ks.end());
  report.queries = ranks.size() + unanswerable;
  report.unanswerable = unanswerable;
  for (int k : ks) {
    const auto hits = std::count_if(ranks.begin(), ranks.end(),
                                    [k](std::size_t r) { return r <= static_cast<std::size_t>(k); });
    report.accuracy.push_back(ranks.empty() ? 0.0
                                            : static_cast<double>(hits) / static_cast<double>(ranks.size()));
  }
  return report;
}

std::vector<std::size_t> truth_ranks(const ModelParams& params, std::span<const LabeledQuery> queries) {
  // Group by relation so each projection of the POI table is computed once.
  std::map<Id, std::vector<std::size_t>> by_relation;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (queries[i].relation) by_relation[*queries[i].relation].push_back(i);
  }
  std::vector<std::size_t> rank_by_query(queries.size(), 0);
  for (const auto& [relation, members] : by_relation) {
    const Matrix projected = project_pois(params, relation);
    for (std::size_t i : members) {
      const auto& q = queries[i];
      if (q.truth < 0 || q.truth >= params.pois.rows()) {
        throw std::out_of_range("ground-truth POI outside the model vocabulary");
      }
      const auto dist = poi_distances(projected, translate_query(params, q.user, relation));
      rank_by_query[i] = rank_of(dist, q.truth);
    }
  }
  std::vector<std::size_t> ranks;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (queries[i].relation) ranks.push_back(rank_by_query[i]);
  }
  return ranks;
}

EvalReport evaluate(const ModelParams& params, std::span<const LabeledQuery> queries,
                    std::span<const int> ks) {
  if (queries.empty()) throw DataError("empty test set");
  const auto ranks = truth_ranks(params, queries);
  return accuracy_from_ranks(ranks, ks, queries.size() - ranks.size());
}

}  // namespace sta
