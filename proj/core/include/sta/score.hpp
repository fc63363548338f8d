#pragma once

#include <map>
#include <span>

#include "sta/params.hpp"
#include "sta/vocab.hpp"

namespace sta {

/// Score of one triple together with the projected endpoints it was built
/// from: score == (head_projected + relation - tail_projected).squaredNorm().
struct ScoreBreakdown {
  double score = 0.0;
  RowVector head_projected;
  RowVector tail_projected;
};

/// Projects entity row `e` into the relation space of relation `r`:
/// e * M_r (TransR), e - (w_r . e) w_r (TransH), or e itself (TransE).
RowVector project(const ModelParams& p, Edge edge, Id r, const RowVector& e);

/// Squared L2 translation distance of a triple. Throws std::out_of_range on
/// ids outside the model.
ScoreBreakdown score(const ModelParams& p, const Triple& t, Edge edge = Edge::kCheckIn);

/// Sparse gradient: only rows and matrices touched by some triple appear.
/// Ordered maps keep accumulation and application order deterministic.
struct RelationGradient {
  std::map<Id, RowVector> emb;
  std::map<Id, Eigen::MatrixXd> proj;
  std::map<Id, RowVector> normal;
};

struct Gradient {
  std::map<Id, RowVector> users;
  std::map<Id, RowVector> pois;
  RelationGradient patterns;
  RelationGradient content;

  std::map<Id, RowVector>& heads(Edge e) { return e == Edge::kCheckIn ? users : pois; }
  RelationGradient& relations(Edge e) { return e == Edge::kCheckIn ? patterns : content; }
  bool empty() const;
};

struct PairOutcome {
  double loss = 0.0;    // max(0, s(pos) + margin - s(neg))
  bool active = false;  // hinge strictly positive
};

/// Adds the gradient of max(0, s(pos) + margin - s(neg)) to `into`. The two
/// triples must share their relation. Inactive hinges add nothing.
PairOutcome accumulate_pair(const ModelParams& p, Edge edge, const Triple& pos, const Triple& neg,
                            double margin, Gradient& into);

/// Gradient of a single hinge term.
Gradient grad_pair(const ModelParams& p, const Triple& pos, const Triple& neg, double margin,
                   Edge edge = Edge::kCheckIn);

/// p -= learning_rate * g.
void apply_gradient(ModelParams& p, const Gradient& g, double learning_rate);

/// Restores the norm constraints for every row touched by `triples`:
/// entity and relation rows are scaled back onto the unit ball, TransH
/// normals are renormalised, and for TransR any endpoint whose projection
/// has norm above one is scaled by 1 / ||e M_r||.
void project_constraints(ModelParams& p, Edge edge, std::span<const Triple> triples);

struct ConstraintAudit {
  double max_excess = 0.0;  // largest amount any bounded norm exceeds 1
  double max_normal_error = 0.0;  // TransH: largest | ||w_r|| - 1 |
  bool holds(double tol) const { return max_excess <= tol && max_normal_error <= tol; }
};

/// Checks every entity and relation row, plus the projected endpoints of
/// `triples` (TransR) and their normals (TransH).
ConstraintAudit audit_constraints(const ModelParams& p, Edge edge, std::span<const Triple> triples);

}  // namespace sta
