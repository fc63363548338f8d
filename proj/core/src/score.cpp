#include "sta/score.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sta {
namespace {

void check_ids(const ModelParams& p, Edge edge, const Triple& t) {
  if (t.head < 0 || t.head >= p.heads(edge).rows() || t.tail < 0 || t.tail >= p.pois.rows() ||
      t.relation < 0 || t.relation >= p.relations(edge).size()) {
    throw std::out_of_range("triple id outside the model vocabulary");
  }
}

void add_to(std::map<Id, RowVector>& m, Id id, const RowVector& g) {
  auto [it, inserted] = m.try_emplace(id, g);
  if (!inserted) it->second += g;
}

void add_to(std::map<Id, Eigen::MatrixXd>& m, Id id, const Eigen::MatrixXd& g) {
  auto [it, inserted] = m.try_emplace(id, g);
  if (!inserted) it->second += g;
}

/// Adds sign * d s(t) / d theta.
void add_score_gradient(const ModelParams& p, Edge edge, const Triple& t, double sign,
                        Gradient& into) {
  const RowVector x = p.heads(edge).row(t.head) - p.pois.row(t.tail);
  const auto& rel = p.relations(edge);
  const RowVector r = rel.emb.row(t.relation);
  auto& heads = into.heads(edge);
  auto& rg = into.relations(edge);

  switch (p.variant) {
    case Variant::kTransE: {
      const RowVector g = (2.0 * sign) * (x + r);
      add_to(heads, t.head, g);
      add_to(into.pois, t.tail, -g);
      add_to(rg.emb, t.relation, g);
      break;
    }
    case Variant::kTransH: {
      const RowVector w = rel.normal.row(t.relation);
      const double wx = w.dot(x);
      const RowVector e = x - wx * w + r;
      const double we = w.dot(e);
      const RowVector gx = (2.0 * sign) * (e - we * w);
      add_to(heads, t.head, gx);
      add_to(into.pois, t.tail, -gx);
      add_to(rg.emb, t.relation, (2.0 * sign) * e);
      add_to(rg.normal, t.relation, (-2.0 * sign) * (we * x + wx * e));
      break;
    }
    case Variant::kTransR: {
      const Eigen::MatrixXd& m = rel.proj[static_cast<std::size_t>(t.relation)];
      const RowVector e = x * m + r;
      const RowVector gx = (2.0 * sign) * (e * m.transpose());
      add_to(heads, t.head, gx);
      add_to(into.pois, t.tail, -gx);
      add_to(rg.emb, t.relation, (2.0 * sign) * e);
      add_to(rg.proj, t.relation, (2.0 * sign) * (x.transpose() * e));
      break;
    }
  }
}

// Rows within this distance of the unit sphere are left alone, so that
// projecting untouched unit rows does not perturb their bits.
constexpr double kNormSlack = 1e-12;

void clamp_unit(Eigen::Ref<RowVector> row) {
  const double n = row.norm();
  if (n > 1.0 + kNormSlack) row /= n;
}

}  // namespace

RowVector project(const ModelParams& p, Edge edge, Id r, const RowVector& e) {
  const auto& rel = p.relations(edge);
  switch (p.variant) {
    case Variant::kTransE:
      return e;
    case Variant::kTransH: {
      const RowVector w = rel.normal.row(r);
      return e - w.dot(e) * w;
    }
    case Variant::kTransR:
      return e * rel.proj[static_cast<std::size_t>(r)];
  }
  return e;
}

ScoreBreakdown score(const ModelParams& p, const Triple& t, Edge edge) {
  check_ids(p, edge, t);
  ScoreBreakdown out;
  out.head_projected = project(p, edge, t.relation, p.heads(edge).row(t.head));
  out.tail_projected = project(p, edge, t.relation, p.pois.row(t.tail));
  out.score =
      (out.head_projected + p.relations(edge).emb.row(t.relation) - out.tail_projected).squaredNorm();
  return out;
}

bool Gradient::empty() const {
  auto rel_empty = [](const RelationGradient& r) {
    return r.emb.empty() && r.proj.empty() && r.normal.empty();
  };
  return users.empty() && pois.empty() && rel_empty(patterns) && rel_empty(content);
}

PairOutcome accumulate_pair(const ModelParams& p, Edge edge, const Triple& pos, const Triple& neg,
                            double margin, Gradient& into) {
  if (pos.relation != neg.relation) {
    throw std::invalid_argument("positive and corrupted triples must share the relation");
  }
  const double hinge = score(p, pos, edge).score + margin - score(p, neg, edge).score;
  if (std::isnan(hinge)) return {hinge, false};
  if (!(hinge > 0.0)) return {0.0, false};
  add_score_gradient(p, edge, pos, 1.0, into);
  add_score_gradient(p, edge, neg, -1.0, into);
  return {hinge, true};
}

Gradient grad_pair(const ModelParams& p, const Triple& pos, const Triple& neg, double margin,
                   Edge edge) {
  Gradient g;
  accumulate_pair(p, edge, pos, neg, margin, g);
  return g;
}

void apply_gradient(ModelParams& p, const Gradient& g, double learning_rate) {
  for (const auto& [id, v] : g.users) p.users.row(id) -= learning_rate * v;
  for (const auto& [id, v] : g.pois) p.pois.row(id) -= learning_rate * v;
  for (Edge edge : {Edge::kCheckIn, Edge::kContent}) {
    const auto& rg = edge == Edge::kCheckIn ? g.patterns : g.content;
    auto& rel = p.relations(edge);
    for (const auto& [id, v] : rg.emb) rel.emb.row(id) -= learning_rate * v;
    for (const auto& [id, m] : rg.proj) rel.proj[static_cast<std::size_t>(id)] -= learning_rate * m;
    for (const auto& [id, v] : rg.normal) rel.normal.row(id) -= learning_rate * v;
  }
}

void project_constraints(ModelParams& p, Edge edge, std::span<const Triple> triples) {
  auto& heads = p.heads(edge);
  auto& rel = p.relations(edge);
  for (const auto& t : triples) {
    clamp_unit(heads.row(t.head));
    clamp_unit(p.pois.row(t.tail));
    clamp_unit(rel.emb.row(t.relation));
    if (p.variant == Variant::kTransH) {
      const double n = rel.normal.row(t.relation).norm();
      if (n > 0.0 && std::abs(n - 1.0) > kNormSlack) rel.normal.row(t.relation) /= n;
    }
  }
  if (p.variant != Variant::kTransR) return;
  // Shrinking only ever lowers norms, so constraints fixed earlier in this
  // loop stay satisfied.
  for (const auto& t : triples) {
    const Eigen::MatrixXd& m = rel.proj[static_cast<std::size_t>(t.relation)];
    auto shrink = [&m](Eigen::Ref<RowVector> row) {
      const double n = (row * m).norm();
      if (n > 1.0 + kNormSlack) row /= n;
    };
    shrink(heads.row(t.head));
    shrink(p.pois.row(t.tail));
  }
}

ConstraintAudit audit_constraints(const ModelParams& p, Edge edge, std::span<const Triple> triples) {
  ConstraintAudit audit;
  auto note = [&](double norm) { audit.max_excess = std::max(audit.max_excess, norm - 1.0); };
  for (const Matrix* m : {&p.users, &p.pois, &p.patterns.emb, &p.content.emb}) {
    for (Eigen::Index r = 0; r < m->rows(); ++r) note(m->row(r).norm());
  }
  const auto& rel = p.relations(edge);
  for (const auto& t : triples) {
    if (p.variant == Variant::kTransR) {
      note(project(p, edge, t.relation, p.heads(edge).row(t.head)).norm());
      note(project(p, edge, t.relation, p.pois.row(t.tail)).norm());
    } else if (p.variant == Variant::kTransH) {
      audit.max_normal_error =
          std::max(audit.max_normal_error, std::abs(rel.normal.row(t.relation).norm() - 1.0));
    }
  }
  return audit;
}

}  // namespace sta
