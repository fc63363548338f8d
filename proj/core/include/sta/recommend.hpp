#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sta/discretize.hpp"
#include "sta/error.hpp"
#include "sta/params.hpp"
#include "sta/vocab.hpp"

namespace sta {

/// A recommendation request: who, when, where.
struct Query {
  Id user = 0;
  std::int64_t timestamp = 0;
  Coord coord;
};

/// How a query's <t, l> pattern was mapped onto a trained relation.
enum class Resolution {
  kExact,          // the pattern was seen in training
  kNearestRegion,  // same slot, nearest region that has that slot
  kSameRegion,     // same region, cyclically nearest slot
  kUnanswerable,   // nothing usable
};

std::string_view to_string(Resolution r);

struct ResolvedPattern {
  Pattern requested;
  std::optional<Id> relation;
  Resolution how = Resolution::kUnanswerable;
};

/// Maps (time, location) onto trained spatiotemporal relations, applying
/// the nearest-pattern fallback for patterns never seen in training.
class PatternIndex {
 public:
  PatternIndex(const Discretizer& disc, const Dictionary& relations);

  ResolvedPattern resolve(std::int64_t timestamp, const Coord& coord) const;
  ResolvedPattern resolve(const Pattern& requested, const Coord& coord) const;

 private:
  const Discretizer* disc_;
  std::map<Pattern, Id> ids_;
};

/// Thrown when the exact pattern of a query is unknown. Carries what the
/// fallback policy would use instead.
class UnknownPattern : public Error {
 public:
  explicit UnknownPattern(ResolvedPattern fallback);
  const ResolvedPattern& fallback() const { return fallback_; }

 private:
  ResolvedPattern fallback_;
};

/// v_q = proj_r(u) + r: the point in relation space where the user's next
/// POI should lie.
RowVector translate_query(const ModelParams& p, Id user, Id relation);

/// Resolves the query's pattern first; throws UnknownPattern unless it was
/// seen in training.
RowVector translate_query(const ModelParams& p, const PatternIndex& index, const Query& q,
                          Id* relation_out = nullptr);

/// All POIs projected into the relation space of `relation` (|V| x m).
Matrix project_pois(const ModelParams& p, Id relation);

/// L1 distance from every projected POI to v_q, summed left to right so
/// the result does not depend on vectorisation.
std::vector<double> poi_distances(const Matrix& projected_pois, const RowVector& v_q);

struct RankedItem {
  Id poi = 0;
  double distance = 0.0;
  bool operator==(const RankedItem&) const = default;
};

/// Ascending by (distance, poi id); length min(k, |V|).
struct RankedResult {
  std::vector<RankedItem> items;
  std::size_t k = 0;
};

/// Exact linear scan over all POIs.
RankedResult rank_pois(const ModelParams& p, const RowVector& v_q, Id relation, std::size_t k);

/// Same result as rank_pois, computed block by block (optionally on
/// several threads) and merged by (distance, id).
RankedResult rank_pois_blocked(const ModelParams& p, const RowVector& v_q, Id relation,
                               std::size_t k, std::size_t block_size, unsigned threads = 1);

/// 1-based rank `truth` gets under the (distance, id) order.
std::size_t rank_of(std::span<const double> distances, Id truth);

}  // namespace sta
