#include "sta/params.hpp"

#include <cmath>

#include "sta/checkin.hpp"
#include "sta/error.hpp"
#include "sta/rng.hpp"

namespace sta {
namespace {

Matrix unit_rows(Id rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  const double bound = 6.0 / std::sqrt(static_cast<double>(cols));
  Matrix m(rows, cols);
  for (Id r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = rng.uniform(-bound, bound);
    const double n = m.row(r).norm();
    if (n > 0.0) m.row(r) /= n;
  }
  return m;
}

RelationTable init_relations(Id count, const ModelShape& shape, std::uint64_t seed,
                             std::string_view family) {
  RelationTable t;
  t.emb = unit_rows(count, shape.rel_dim, derive_seed(seed, std::string(family) + ".emb"));
  if (shape.variant == Variant::kTransR) {
    t.proj.assign(static_cast<std::size_t>(count), identity_pattern(shape.dim, shape.rel_dim));
  }
  if (shape.variant == Variant::kTransH) {
    t.normal = unit_rows(count, shape.dim, derive_seed(seed, std::string(family) + ".normal"));
  }
  return t;
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kTransE: return "transE";
    case Variant::kTransH: return "transH";
    case Variant::kTransR: return "transR";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  const auto n = lowercase(name);
  if (n == "transe" || n == "sta-e") return Variant::kTransE;
  if (n == "transh" || n == "sta-h") return Variant::kTransH;
  if (n == "transr" || n == "sta") return Variant::kTransR;
  throw ConfigError("unknown variant: '" + std::string(name) + "'");
}

bool RelationTable::operator==(const RelationTable& o) const {
  if (emb != o.emb || normal != o.normal || proj.size() != o.proj.size()) return false;
  for (std::size_t i = 0; i < proj.size(); ++i) {
    if (proj[i] != o.proj[i]) return false;
  }
  return true;
}

bool ModelParams::operator==(const ModelParams& o) const {
  return variant == o.variant && dim == o.dim && rel_dim == o.rel_dim && users == o.users &&
         pois == o.pois && patterns == o.patterns && content == o.content;
}

Eigen::MatrixXd identity_pattern(int rows, int cols) {
  return Eigen::MatrixXd::Identity(rows, cols);
}

void validate_shape(const ModelShape& shape) {
  if (shape.dim < 1 || shape.rel_dim < 1) throw ConfigError("dimensions must be at least 1");
  if (shape.users < 1 || shape.pois < 1 || shape.relations < 1) {
    throw ConfigError("model needs at least one user, POI and relation");
  }
  if (shape.content < 0) throw ConfigError("negative content vocabulary size");
  if (shape.variant != Variant::kTransR && shape.dim != shape.rel_dim) {
    throw ConfigError(std::string(to_string(shape.variant)) +
                      " requires equal entity and relation dimensions (d = m)");
  }
}

ModelParams init_params(const ModelShape& shape, std::uint64_t seed) {
  validate_shape(shape);
  ModelParams p;
  p.variant = shape.variant;
  p.dim = shape.dim;
  p.rel_dim = shape.rel_dim;
  p.users = unit_rows(shape.users, shape.dim, derive_seed(seed, "init.users"));
  p.pois = unit_rows(shape.pois, shape.dim, derive_seed(seed, "init.pois"));
  p.patterns = init_relations(shape.relations, shape, seed, "init.patterns");
  p.content = init_relations(shape.content, shape, seed, "init.content");
  return p;
}

}  // namespace sta
