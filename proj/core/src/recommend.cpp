#include "sta/recommend.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "sta/score.hpp"

namespace sta {
namespace {

bool before(const RankedItem& a, const RankedItem& b) {
  return a.distance < b.distance || (a.distance == b.distance && a.poi < b.poi);
}

std::vector<RankedItem> top_k(std::span<const double> dist, Id offset, std::size_t k) {
  std::vector<RankedItem> items(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    items[i] = {static_cast<Id>(offset + static_cast<Id>(i)), dist[i]};
  }
  const std::size_t n = std::min(k, items.size());
  std::partial_sort(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(n), items.end(), before);
  items.resize(n);
  return items;
}

}  // namespace

std::string_view to_string(Resolution r) {
  switch (r) {
    case Resolution::kExact: return "exact";
    case Resolution::kNearestRegion: return "nearest-region";
    case Resolution::kSameRegion: return "same-region";
    case Resolution::kUnanswerable: return "unanswerable";
  }
  return "?";
}

PatternIndex::PatternIndex(const Discretizer& disc, const Dictionary& relations) : disc_(&disc) {
  for (Id r = 0; r < relations.size(); ++r) {
    if (const auto p = parse_pattern_key(relations.key(r))) ids_.emplace(*p, r);
  }
}

ResolvedPattern PatternIndex::resolve(std::int64_t timestamp, const Coord& coord) const {
  return resolve(Pattern{disc_->slot(timestamp), disc_->region(coord)}, coord);
}

ResolvedPattern PatternIndex::resolve(const Pattern& requested, const Coord& coord) const {
  ResolvedPattern out;
  out.requested = requested;
  if (auto it = ids_.find(requested); it != ids_.end()) {
    out.relation = it->second;
    out.how = Resolution::kExact;
    return out;
  }

  // Same slot, region whose centroid is nearest to the query location.
  const auto& centroids = disc_->regions().centroids;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [pattern, id] : ids_) {
    if (pattern.slot != requested.slot || pattern.region < 0 ||
        pattern.region >= static_cast<int>(centroids.size())) {
      continue;
    }
    const double d = sq_distance(coord, centroids[static_cast<std::size_t>(pattern.region)]);
    if (d < best) {  // map order: ties keep the lowest region
      best = d;
      out.relation = id;
    }
  }
  if (out.relation) {
    out.how = Resolution::kNearestRegion;
    return out;
  }

  // Same region, cyclically nearest slot.
  const int slots = num_slots(disc_->time_scheme());
  int best_gap = std::numeric_limits<int>::max();
  for (const auto& [pattern, id] : ids_) {
    if (pattern.region != requested.region) continue;
    const int diff = std::abs(pattern.slot - requested.slot);
    const int gap = std::min(diff, slots - diff);
    if (gap < best_gap) {
      best_gap = gap;
      out.relation = id;
    }
  }
  out.how = out.relation ? Resolution::kSameRegion : Resolution::kUnanswerable;
  return out;
}

UnknownPattern::UnknownPattern(ResolvedPattern fallback)
    : Error("spatiotemporal pattern " + pattern_key(fallback.requested) +
            " was not seen in training (fallback: " + std::string(to_string(fallback.how)) + ")"),
      fallback_(std::move(fallback)) {}

RowVector translate_query(const ModelParams& p, Id user, Id relation) {
  if (user < 0 || user >= p.users.rows() || relation < 0 || relation >= p.patterns.size()) {
    throw std::out_of_range("query id outside the model vocabulary");
  }
  return project(p, Edge::kCheckIn, relation, p.users.row(user)) + p.patterns.emb.row(relation);
}

RowVector translate_query(const ModelParams& p, const PatternIndex& index, const Query& q,
                          Id* relation_out) {
  const ResolvedPattern resolved = index.resolve(q.timestamp, q.coord);
  if (resolved.how != Resolution::kExact) throw UnknownPattern(resolved);
  if (relation_out != nullptr) *relation_out = *resolved.relation;
  return translate_query(p, q.user, *resolved.relation);
}

Matrix project_pois(const ModelParams& p, Id relation) {
  switch (p.variant) {
    case Variant::kTransE:
      return p.pois;
    case Variant::kTransH: {
      const RowVector w = p.patterns.normal.row(relation);
      const Eigen::VectorXd dots = p.pois * w.transpose();
      return p.pois - dots * w;
    }
    case Variant::kTransR:
      return p.pois * p.patterns.proj[static_cast<std::size_t>(relation)];
  }
  return p.pois;
}

std::vector<double> poi_distances(const Matrix& projected_pois, const RowVector& v_q) {
  std::vector<double> out(static_cast<std::size_t>(projected_pois.rows()));
  for (Eigen::Index i = 0; i < projected_pois.rows(); ++i) {
    double d = 0.0;
    for (Eigen::Index j = 0; j < v_q.size(); ++j) d += std::abs(projected_pois(i, j) - v_q(j));
    out[static_cast<std::size_t>(i)] = d;
  }
  return out;
}

RankedResult rank_pois(const ModelParams& p, const RowVector& v_q, Id relation, std::size_t k) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  const auto dist = poi_distances(project_pois(p, relation), v_q);
  return {top_k(dist, 0, k), k};
}

RankedResult rank_pois_blocked(const ModelParams& p, const RowVector& v_q, Id relation,
                               std::size_t k, std::size_t block_size, unsigned threads) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (block_size < 1) throw std::invalid_argument("block size must be at least 1");
  const Matrix projected = project_pois(p, relation);
  const auto n = static_cast<std::size_t>(projected.rows());
  const std::size_t blocks = (n + block_size - 1) / block_size;
  std::vector<std::vector<RankedItem>> partial(blocks);

  auto work = [&](std::size_t first_block, std::size_t stride) {
    for (std::size_t b = first_block; b < blocks; b += stride) {
      const std::size_t lo = b * block_size;
      const std::size_t len = std::min(block_size, n - lo);
      const auto dist = poi_distances(projected.middleRows(static_cast<Eigen::Index>(lo),
                                                           static_cast<Eigen::Index>(len)),
                                      v_q);
      partial[b] = top_k(dist, static_cast<Id>(lo), k);
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(blocks, 1))));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
  }

  std::vector<RankedItem> merged;
  for (auto& part : partial) merged.insert(merged.end(), part.begin(), part.end());
  const std::size_t take = std::min(k, merged.size());
  std::partial_sort(merged.begin(), merged.begin() + static_cast<std::ptrdiff_t>(take), merged.end(), before);
  merged.resize(take);
  return {std::move(merged), k};
}

std::size_t rank_of(std::span<const double> distances, Id truth) {
  const double d = distances[static_cast<std::size_t>(truth)];
  std::size_t ahead = 0;
  for (std::size_t v = 0; v < distances.size(); ++v) {
    if (distances[v] < d || (distances[v] == d && static_cast<Id>(v) < truth)) ++ahead;
  }
  return ahead + 1;
}

}  // namespace sta
