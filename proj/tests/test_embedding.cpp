#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "sta/error.hpp"
#include "sta/model_io.hpp"
#include "sta/params.hpp"
#include "sta/score.hpp"
#include "support/oracles.hpp"

using namespace sta;

namespace {

ModelParams small(Variant v, int d, int m, Id users = 2, Id pois = 2, Id rels = 1, Id content = 0) {
  return init_params({users, pois, rels, content, d, m, v}, 1);
}

RowVector vec(std::initializer_list<double> xs) {
  RowVector r(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) r(i++) = x;
  return r;
}

}  // namespace

TEST(Init, IdentityProjectionsAndUnitRows) {
  const auto p = init_params({30, 40, 5, 3, 8, 8, Variant::kTransR}, 17);
  for (const auto& m : p.patterns.proj) EXPECT_TRUE(m.isApprox(Eigen::MatrixXd::Identity(8, 8), 0.0));
  for (const auto& m : p.content.proj) EXPECT_EQ(m, identity_pattern(8, 8));
  for (Id u = 0; u < p.users.rows(); ++u) EXPECT_NEAR(p.users.row(u).norm(), 1.0, 1e-9);
  for (Id v = 0; v < p.pois.rows(); ++v) EXPECT_NEAR(p.pois.row(v).norm(), 1.0, 1e-9);
  const auto rect = identity_pattern(3, 5);
  EXPECT_EQ(rect(2, 2), 1.0);
  EXPECT_EQ(rect.sum(), 3.0);
}

TEST(Init, TransHNormalsAreUnit) {
  const auto p = init_params({3, 3, 6, 0, 5, 5, Variant::kTransH}, 2);
  for (Id r = 0; r < 6; ++r) EXPECT_NEAR(p.patterns.normal.row(r).norm(), 1.0, 1e-12);
}

TEST(Init, SameSeedBitIdenticalBytes) {
  const auto dir = oracle::scratch_dir("init");
  Vocab vocab;
  const ModelShape shape{10, 12, 4, 0, 6, 5, Variant::kTransR};
  save_state(dir / "a", init_params(shape, 99), 0);
  save_state(dir / "b", init_params(shape, 99), 0);
  save_state(dir / "c", init_params(shape, 100), 0);
  EXPECT_EQ(oracle::read_bytes(dir / "a"), oracle::read_bytes(dir / "b"));
  EXPECT_NE(oracle::read_bytes(dir / "a"), oracle::read_bytes(dir / "c"));
}

TEST(Init, ContentTablesDoNotPerturbOthers) {
  const auto a = init_params({5, 6, 2, 0, 4, 4, Variant::kTransR}, 3);
  const auto b = init_params({5, 6, 2, 7, 4, 4, Variant::kTransR}, 3);
  EXPECT_EQ(a.users, b.users);
  EXPECT_EQ(a.pois, b.pois);
  EXPECT_EQ(a.patterns, b.patterns);
}

TEST(Init, ShapeValidation) {
  EXPECT_THROW(init_params({1, 1, 1, 0, 4, 3, Variant::kTransE}, 0), ConfigError);
  EXPECT_THROW(init_params({1, 1, 1, 0, 4, 3, Variant::kTransH}, 0), ConfigError);
  EXPECT_NO_THROW(init_params({1, 1, 1, 0, 4, 3, Variant::kTransR}, 0));
  EXPECT_THROW(init_params({0, 1, 1, 0, 4, 4, Variant::kTransR}, 0), ConfigError);
  EXPECT_EQ(parse_variant("STA"), Variant::kTransR);
  EXPECT_EQ(parse_variant("sta-h"), Variant::kTransH);
  EXPECT_EQ(parse_variant("transE"), Variant::kTransE);
}

TEST(Score, ExactTranslationTransR) {
  auto p = small(Variant::kTransR, 2, 2);
  p.users.row(0) = vec({0.6, 0.0});
  p.patterns.emb.row(0) = vec({0.0, 0.8});
  p.pois.row(1) = vec({0.6, 0.8});
  EXPECT_EQ(score(p, {0, 0, 1}).score, 0.0);
}

TEST(Score, IdentityTransE) {
  auto p = small(Variant::kTransE, 3, 3);
  p.pois.row(0) = p.users.row(1);
  p.patterns.emb.setZero();
  EXPECT_EQ(score(p, {1, 0, 0}).score, 0.0);
}

TEST(Score, MatchesStraightLineEvaluator) {
  std::mt19937_64 gen(4);
  for (Variant v : {Variant::kTransE, Variant::kTransH, Variant::kTransR}) {
    for (int i = 0; i < 200; ++i) {
      const int m = v == Variant::kTransR ? 3 : 4;
      const auto p = oracle::random_params(v, 4, m, 3, 5, 2, 2, gen());
      const Triple t{static_cast<Id>(gen() % 3), static_cast<Id>(gen() % 2), static_cast<Id>(gen() % 5)};
      const double want = oracle::score(p, t);
      EXPECT_NEAR(score(p, t).score, want, 1e-12 * std::max(1.0, want));
      const Triple c{static_cast<Id>(gen() % 5), static_cast<Id>(gen() % 2), static_cast<Id>(gen() % 5)};
      const double wc = oracle::score(p, c, Edge::kContent);
      EXPECT_NEAR(score(p, c, Edge::kContent).score, wc, 1e-12 * std::max(1.0, wc));
    }
  }
}

TEST(Score, OutOfRangeIdsThrow) {
  const auto p = small(Variant::kTransR, 2, 2);
  EXPECT_THROW(score(p, {2, 0, 0}), std::out_of_range);
  EXPECT_THROW(score(p, {0, 1, 0}), std::out_of_range);
  EXPECT_THROW(score(p, {0, 0, -1}), std::out_of_range);
}

TEST(Gradient, InactiveHingeIsZero) {
  // s = 1, s' = 4, margin 2: 1 + 2 - 4 < 0.
  auto p = small(Variant::kTransE, 1, 1);
  p.users.row(0) = vec({0.0});
  p.patterns.emb.row(0) = vec({0.0});
  p.pois.row(0) = vec({1.0});
  p.pois.row(1) = vec({2.0});
  const Gradient g = grad_pair(p, {0, 0, 0}, {0, 0, 1}, 2.0);
  EXPECT_TRUE(g.empty());
}

TEST(Gradient, HandDifferentiatedTransE) {
  auto p = small(Variant::kTransE, 2, 2);
  p.users.row(0) = vec({0.0, 0.0});
  p.patterns.emb.row(0) = vec({0.0, 0.0});
  p.pois.row(0) = vec({1.0, 0.0});  // v
  p.pois.row(1) = vec({0.0, 0.0});  // v'
  const Gradient g = grad_pair(p, {0, 0, 0}, {0, 0, 1}, 0.0);
  EXPECT_EQ(g.pois.at(0), vec({2.0, 0.0}));
  EXPECT_EQ(g.users.at(0), vec({-2.0, 0.0}));
  EXPECT_EQ(g.pois.at(1), vec({0.0, 0.0}));
}

TEST(Gradient, FiniteDifferencesAllVariantsBothEdges) {
  std::mt19937_64 gen(77);
  for (Variant v : {Variant::kTransE, Variant::kTransH, Variant::kTransR}) {
    for (Edge edge : {Edge::kCheckIn, Edge::kContent}) {
      for (int i = 0; i < 25; ++i) {
        const int m = v == Variant::kTransR ? 3 : 5;
        const auto p = oracle::random_params(v, 5, m, 3, 4, 2, 2, gen());
        const Id heads = edge == Edge::kCheckIn ? 3 : 4;
        const Triple pos{static_cast<Id>(gen() % heads), static_cast<Id>(gen() % 2), static_cast<Id>(gen() % 4)};
        Triple neg = pos;
        neg.tail = (pos.tail + 1 + static_cast<Id>(gen() % 3)) % 4;
        const double margin = 5.0 + oracle::score(p, neg, edge) - oracle::score(p, pos, edge);
        const auto analytic = oracle::dense(p, grad_pair(p, pos, neg, margin, edge));
        const auto numeric = oracle::finite_difference(
            p, [&](const ModelParams& q) { return oracle::hinge(q, pos, neg, margin, edge); }, 1e-6);
        EXPECT_LT(oracle::relative_error(analytic, numeric), 1e-5);
      }
    }
  }
}

TEST(Gradient, HeadCorruptionSharesTail) {
  std::mt19937_64 gen(5);
  const auto p = oracle::random_params(Variant::kTransR, 4, 4, 3, 3, 1, 0, gen());
  const Triple pos{0, 0, 2}, neg{1, 0, 2};
  const double margin = 5.0 + oracle::score(p, neg) - oracle::score(p, pos);
  const auto analytic = oracle::dense(p, grad_pair(p, pos, neg, margin));
  const auto numeric = oracle::finite_difference(
      p, [&](const ModelParams& q) { return oracle::hinge(q, pos, neg, margin); }, 1e-6);
  EXPECT_LT(oracle::relative_error(analytic, numeric), 1e-5);
}

TEST(Gradient, MismatchedRelationsRejected) {
  const auto p = small(Variant::kTransE, 2, 2, 2, 2, 2);
  Gradient g;
  EXPECT_THROW(accumulate_pair(p, Edge::kCheckIn, {0, 0, 0}, {0, 1, 1}, 1.0, g), std::invalid_argument);
}

TEST(Gradient, ApplyIsPlainStep) {
  auto p = small(Variant::kTransE, 2, 2);
  const auto before = p;
  Gradient g;
  g.users[1] = vec({1.0, -2.0});
  g.patterns.emb[0] = vec({0.5, 0.5});
  apply_gradient(p, g, 0.1);
  EXPECT_TRUE(p.users.row(1).isApprox(before.users.row(1) - 0.1 * vec({1.0, -2.0})));
  EXPECT_TRUE(p.patterns.emb.row(0).isApprox(before.patterns.emb.row(0) - vec({0.05, 0.05})));
  EXPECT_EQ(p.users.row(0), before.users.row(0));
  EXPECT_EQ(p.pois, before.pois);
}

TEST(Constraints, ShortRowUnchangedLongRowRescaled) {
  auto p = small(Variant::kTransE, 2, 2);
  p.users.row(0) = vec({0.3, 0.4});  // norm 0.5
  p.pois.row(0) = vec({1.2, 1.6});   // norm 2
  const std::vector<Triple> t = {{0, 0, 0}};
  project_constraints(p, Edge::kCheckIn, t);
  EXPECT_EQ(p.users.row(0), vec({0.3, 0.4}));
  EXPECT_NEAR(p.pois.row(0).norm(), 1.0, 1e-15);
  EXPECT_NEAR(p.pois(0, 0) / p.pois(0, 1), 0.75, 1e-15);
}

TEST(Constraints, RandomBatchesSatisfyAllConstraints) {
  std::mt19937_64 gen(6);
  for (Variant v : {Variant::kTransE, Variant::kTransH, Variant::kTransR}) {
    for (int i = 0; i < 50; ++i) {
      auto p = oracle::random_params(v, 4, 4, 5, 6, 3, 0, gen(), 2.0);
      std::vector<Triple> batch;
      for (int j = 0; j < 10; ++j) {
        batch.push_back({static_cast<Id>(gen() % 5), static_cast<Id>(gen() % 3), static_cast<Id>(gen() % 6)});
      }
      // Project every row so that untouched rows do not count against the audit.
      std::vector<Triple> all;
      for (Id u = 0; u < 6; ++u)
        for (Id r = 0; r < 3; ++r) all.push_back({u % 5, r, u});
      project_constraints(p, Edge::kCheckIn, all);
      project_constraints(p, Edge::kCheckIn, batch);
      EXPECT_LE(oracle::constraint_violation(p, Edge::kCheckIn, batch), 1e-12);
      const auto audit = audit_constraints(p, Edge::kCheckIn, batch);
      EXPECT_TRUE(audit.holds(1e-12));
    }
  }
}

TEST(Constraints, AuditDetectsViolation) {
  auto p = small(Variant::kTransR, 2, 2);
  p.patterns.proj[0] *= 3.0;
  const std::vector<Triple> t = {{0, 0, 0}};
  EXPECT_FALSE(audit_constraints(p, Edge::kCheckIn, t).holds(1e-9));
  EXPECT_GT(oracle::constraint_violation(p, Edge::kCheckIn, t), 1e-9);
}

TEST(ModelIo, RoundTripKeepsFloatPrecision) {
  const auto dir = oracle::scratch_dir("modelio");
  std::mt19937_64 gen(8);
  for (Variant v : {Variant::kTransE, Variant::kTransH, Variant::kTransR}) {
    const int m = v == Variant::kTransR ? 3 : 4;
    const auto p = oracle::random_params(v, 4, m, 3, 5, 2, 2, gen());
    Vocab vocab;
    for (const char* k : {"a", "b", "c"}) vocab.users.intern(k);
    for (const char* k : {"p0", "p1", "p2", "p3", "p4"}) vocab.pois.intern(k);
    vocab.relations.intern("1:0");
    vocab.relations.intern("2:0");
    vocab.content.intern("x@0");
    vocab.content.intern("y@0");
    save_model(dir / "m.sta", p, vocab);
    const auto back = load_model(dir / "m.sta");
    EXPECT_EQ(back.params, round_to_float(p));
    EXPECT_EQ(back.vocab, vocab);

    save_state(dir / "m.state", p, 12);
    const auto state = load_state(dir / "m.state");
    EXPECT_EQ(state.params, p);
    EXPECT_EQ(state.next_epoch, 12);
  }
}

TEST(ModelIo, HeaderIsLittleEndianMagic) {
  const auto dir = oracle::scratch_dir("modelio_header");
  const auto p = small(Variant::kTransR, 3, 2);
  Vocab vocab;
  vocab.users.intern("u0");
  vocab.users.intern("u1");
  vocab.pois.intern("p0");
  vocab.pois.intern("p1");
  vocab.relations.intern("0:0");
  save_model(dir / "m.sta", p, vocab);
  const std::string bytes = oracle::read_bytes(dir / "m.sta");
  ASSERT_GE(bytes.size(), 32u);
  EXPECT_EQ(bytes.substr(0, 4), "STA1");
  auto i32 = [&](std::size_t off) {
    std::uint32_t x = 0;
    for (int b = 3; b >= 0; --b) x = (x << 8) | static_cast<unsigned char>(bytes[off + static_cast<std::size_t>(b)]);
    return static_cast<std::int32_t>(x);
  };
  EXPECT_EQ(i32(4), 2);   // TransR
  EXPECT_EQ(i32(8), 3);   // d
  EXPECT_EQ(i32(12), 2);  // m
  EXPECT_EQ(i32(16), 2);  // users
  EXPECT_EQ(i32(20), 2);  // pois
  EXPECT_EQ(i32(24), 1);  // patterns
  EXPECT_EQ(i32(28), 0);  // content
}

TEST(ModelIo, CorruptFilesRejected) {
  const auto dir = oracle::scratch_dir("modelio_bad");
  {
    std::ofstream out(dir / "bad.sta", std::ios::binary);
    out << "NOPE1234";
  }
  EXPECT_THROW(load_model(dir / "bad.sta"), DataError);
  EXPECT_THROW(load_model(dir / "missing.sta"), MissingInputError);

  const auto p = small(Variant::kTransR, 3, 2);
  Vocab vocab;
  vocab.users.intern("u0");
  vocab.users.intern("u1");
  vocab.pois.intern("p0");
  vocab.pois.intern("p1");
  vocab.relations.intern("0:0");
  save_model(dir / "m.sta", p, vocab);
  const std::string bytes = oracle::read_bytes(dir / "m.sta");
  {
    std::ofstream out(dir / "trunc.sta", std::ios::binary);
    out << bytes.substr(0, bytes.size() / 2);
  }
  EXPECT_THROW(load_model(dir / "trunc.sta"), DataError);
}
