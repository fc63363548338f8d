#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sta/vocab.hpp"

namespace sta {

/// Translation model family: TransE (no projection), TransH (hyperplane
/// projection per relation) or TransR (matrix projection per relation).
enum class Variant : std::int32_t { kTransE = 0, kTransH = 1, kTransR = 2 };

std::string_view to_string(Variant v);
/// Accepts "transE"/"sta-e", "transH"/"sta-h", "transR"/"sta" (case-insensitive).
Variant parse_variant(std::string_view name);

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::RowVectorXd;

/// Embeddings of one relation family (spatiotemporal or content patterns).
struct RelationTable {
  Matrix emb;                         // |R| x m
  std::vector<Eigen::MatrixXd> proj;  // TransR only: |R| matrices of d x m
  Matrix normal;                      // TransH only: |R| x d, unit rows

  Id size() const { return static_cast<Id>(emb.rows()); }
  bool operator==(const RelationTable& o) const;
};

/// Which entity tables a triple connects: user -> POI through a
/// spatiotemporal pattern, or POI -> POI through a content pattern.
enum class Edge { kCheckIn, kContent };

struct ModelParams {
  Variant variant = Variant::kTransR;
  int dim = 0;      // entity space d
  int rel_dim = 0;  // relation space m
  Matrix users;     // |U| x d
  Matrix pois;      // |V| x d
  RelationTable patterns;
  RelationTable content;

  const Matrix& heads(Edge e) const { return e == Edge::kCheckIn ? users : pois; }
  Matrix& heads(Edge e) { return e == Edge::kCheckIn ? users : pois; }
  const RelationTable& relations(Edge e) const { return e == Edge::kCheckIn ? patterns : content; }
  RelationTable& relations(Edge e) { return e == Edge::kCheckIn ? patterns : content; }

  bool operator==(const ModelParams& o) const;
};

struct ModelShape {
  Id users = 0;
  Id pois = 0;
  Id relations = 0;
  Id content = 0;  // may be zero: no content patterns
  int dim = 100;
  int rel_dim = 100;
  Variant variant = Variant::kTransR;
};

/// Throws ConfigError on a shape the variant cannot use.
void validate_shape(const ModelShape& shape);

/// Rows uniform in [-6/sqrt(n), 6/sqrt(n)] then scaled to unit norm;
/// projections start as the d x m matrix with ones on the main diagonal;
/// hyperplane normals start random and unit. Each table draws from its own
/// stream, so adding content patterns does not change the other tables.
ModelParams init_params(const ModelShape& shape, std::uint64_t seed);

/// d x m matrix with ones on the main diagonal.
Eigen::MatrixXd identity_pattern(int rows, int cols);

}  // namespace sta
