// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria (0 when everything passes).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sta/evaluate.hpp"
#include "sta/experiments.hpp"
#include "sta/recommend.hpp"
#include "sta/rng.hpp"
#include "sta/sampler.hpp"
#include "sta/score.hpp"
#include "sta/synthetic.hpp"
#include "sta/trainer.hpp"
#include "sta_cli/cli.hpp"
#include "support/oracles.hpp"

namespace {

using namespace sta;
namespace fs = std::filesystem;

// Pinned tolerances and budgets.
constexpr double kGradientRelTol = 1e-5;
constexpr double kFiniteDifferenceStep = 1e-6;
constexpr int kGradientConfigs = 100;
constexpr double kGradientSeconds = 10.0;

constexpr double kConstraintTol = 1e-9;
constexpr int kConstraintEpochs = 50;
constexpr std::size_t kConstraintTriples = 5000;
constexpr double kConstraintSeconds = 60.0;

constexpr double kPlantedAcc1 = 0.70;
constexpr double kPlantedAcc10 = 0.95;
constexpr int kPlantedEpochs = 300;
constexpr double kPlantedSeconds = 300.0;

constexpr double kReductionRelTol = 1e-12;
constexpr int kReductionTriples = 1000;

constexpr int kRankingInstances = 100;

constexpr double kSamplingTol = 0.01;
constexpr int kSamplingDraws = 100000;

constexpr double kSparsityRatio = 0.20;
constexpr double kSparsityNoise = 0.01;
constexpr int kSparsitySeeds = 10;
constexpr int kSparsityRequired = 9;

constexpr int kColdSeeds = 10;
constexpr int kColdRequired = 8;
constexpr double kColdSeconds = 300.0;

// Training settings for the planted-data criteria (the published defaults
// are sized for the large real datasets).
TrainConfig planted_config(std::uint64_t seed, int epochs) {
  TrainConfig c;
  c.learning_rate = 0.001;
  c.margin = 1.0;
  c.batch_size = 100;
  c.epochs = epochs;
  c.dim = 32;
  c.rel_dim = 32;
  c.seed = seed;
  return c;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome gradient_oracle() {
  Stopwatch clock;
  double worst = 0.0;
  int checked = 0;
  std::mt19937_64 gen(20240601);
  for (Variant v : {Variant::kTransE, Variant::kTransH, Variant::kTransR}) {
    for (int cfg = 0; cfg < kGradientConfigs; ++cfg) {
      const auto p = oracle::random_params(v, 6, 6, 3, 4, 2, 0, gen());
      std::uniform_int_distribution<Id> user(0, 2), poi(0, 3), rel(0, 1);
      const Triple pos{user(gen), rel(gen), poi(gen)};
      Triple neg = pos;
      if (gen() % 2) {
        do neg.head = user(gen); while (neg.head == pos.head);
      } else {
        do neg.tail = poi(gen); while (neg.tail == pos.tail);
      }
      // Large margin keeps the hinge active away from its kink.
      const double margin = 10.0 + oracle::score(p, neg) - oracle::score(p, pos);
      const Gradient g = grad_pair(p, pos, neg, margin);
      const auto analytic = oracle::dense(p, g);
      const auto numeric = oracle::finite_difference(
          p, [&](const ModelParams& q) { return oracle::hinge(q, pos, neg, margin); },
          kFiniteDifferenceStep);
      worst = std::max(worst, oracle::relative_error(analytic, numeric));
      ++checked;
    }
  }
  const double s = clock.seconds();
  return {worst < kGradientRelTol && s < kGradientSeconds,
          fmt("%d configs, max relative error %.3g (< %g), %.2fs (< %gs)", checked, worst,
              kGradientRelTol, s, kGradientSeconds)};
}

Outcome constraint_audit() {
  Stopwatch clock;
  PlantedSpec spec;
  spec.train_size = kConstraintTriples;
  spec.seed = 11;
  const auto data = make_planted(spec);
  double worst = 0.0;
  std::size_t batches = 0;
  for (Variant v : {Variant::kTransE, Variant::kTransH, Variant::kTransR}) {
    TrainConfig c = planted_config(3, kConstraintEpochs);
    c.dim = c.rel_dim = 16;
    c.batch_size = 500;
    c.variant = v;
    TrainOptions opts;
    opts.hooks.after_batch = [&](const BatchTrace& trace, const ModelParams& p) {
      std::vector<Triple> touched;
      for (const auto& pair : trace.pairs) {
        touched.push_back(pair.positive);
        touched.push_back(pair.negative);
      }
      worst = std::max(worst, oracle::constraint_violation(p, trace.edge, touched));
      ++batches;
    };
    train(data.train, c, opts);
  }
  const double s = clock.seconds();
  return {worst <= kConstraintTol && s < kConstraintSeconds,
          fmt("%zu batches over 3 variants, max excess %.3g (<= %g), %.2fs (< %gs)", batches, worst,
              kConstraintTol, s, kConstraintSeconds)};
}

Outcome planted_recovery() {
  Stopwatch clock;
  PlantedSpec spec;  // 50 users, 200 POIs, 20 relations, d = 16, sigma = 0.05
  const auto data = make_planted(spec);
  const auto result = train(data.train, planted_config(7, kPlantedEpochs));
  const auto ranks = truth_ranks(result.params, data.test);
  const double a1 = oracle::hit_rate(ranks, 1);
  const double a10 = oracle::hit_rate(ranks, 10);
  const double s = clock.seconds();
  return {a1 >= kPlantedAcc1 && a10 >= kPlantedAcc10 && ranks.size() == spec.test_size &&
              s < kPlantedSeconds,
          fmt("%zu queries, acc@1 %.3f (>= %.2f), acc@10 %.3f (>= %.2f), %.1fs (< %gs)", ranks.size(),
              a1, kPlantedAcc1, a10, kPlantedAcc10, s, kPlantedSeconds)};
}

Outcome variant_reduction() {
  double worst = 0.0;
  std::mt19937_64 gen(99);
  for (int i = 0; i < kReductionTriples; ++i) {
    const int d = 2 + static_cast<int>(gen() % 15);
    ModelParams r = oracle::random_params(Variant::kTransR, d, d, 4, 5, 3, 0, gen());
    for (auto& m : r.patterns.proj) m = identity_pattern(d, d);
    ModelParams e = r;
    e.variant = Variant::kTransE;
    e.patterns.proj.clear();
    const Triple t{static_cast<Id>(gen() % 4), static_cast<Id>(gen() % 3), static_cast<Id>(gen() % 5)};
    const double sr = score(r, t).score;
    const double se = score(e, t).score;
    worst = std::max(worst, std::abs(sr - se) / std::max(std::abs(se), 1e-300));
  }
  return {worst <= kReductionRelTol,
          fmt("%d triples, max relative difference %.3g (<= %g)", kReductionTriples, worst,
              kReductionRelTol)};
}

Outcome ranking_oracle() {
  std::mt19937_64 gen(5150);
  int mismatches = 0;
  for (int i = 0; i < kRankingInstances; ++i) {
    const Variant v = static_cast<Variant>(i % 3);
    const int d = 2 + static_cast<int>(gen() % 8);
    const int m = v == Variant::kTransR ? 2 + static_cast<int>(gen() % 8) : d;
    const Id pois = 1 + static_cast<Id>(gen() % 150);
    auto p = oracle::random_params(v, d, m, 3, pois, 4, 0, gen());
    if (i % 4 == 0) {
      // Coarse values force many exact distance ties.
      for (Eigen::Index r = 0; r < p.pois.rows(); ++r)
        for (Eigen::Index c = 0; c < p.pois.cols(); ++c) p.pois(r, c) = std::round(p.pois(r, c));
    }
    const Id user = static_cast<Id>(gen() % 3);
    const Id rel = static_cast<Id>(gen() % 4);
    const std::size_t k = 1 + gen() % 25;
    const RowVector v_q = translate_query(p, user, rel);
    const auto got = rank_pois(p, v_q, rel, k);
    const auto want = oracle::brute_force_top_k(oracle::l1_distances(p, user, rel), k);
    bool same = got.items.size() == want.size();
    for (std::size_t j = 0; same && j < want.size(); ++j) {
      same = got.items[j].poi == want[j].first;
    }
    mismatches += same ? 0 : 1;
  }
  return {mismatches == 0, fmt("%d instances, %d mismatches", kRankingInstances, mismatches)};
}

Outcome evaluation_arithmetic() {
  const std::vector<std::size_t> fixture = {1, 3, 7, 12};
  const std::vector<int> ks = {1, 5, 10, 15};
  const auto r = accuracy_from_ranks(fixture, ks);
  const bool exact = r.at(1) == 0.25 && r.at(5) == 0.50 && r.at(10) == 0.75 && r.at(15) == 1.0;

  std::mt19937_64 gen(31337);
  int violations = 0;
  const int fuzz = 1000;
  for (int i = 0; i < fuzz; ++i) {
    std::vector<std::size_t> ranks(1 + gen() % 50);
    for (auto& x : ranks) x = 1 + gen() % 40;
    std::vector<int> sorted_ks;
    for (int j = 0, n = 1 + static_cast<int>(gen() % 8); j < n; ++j) sorted_ks.push_back(1 + static_cast<int>(gen() % 40));
    std::sort(sorted_ks.begin(), sorted_ks.end());
    const auto rep = accuracy_from_ranks(ranks, sorted_ks);
    for (std::size_t j = 1; j < rep.accuracy.size(); ++j) {
      if (rep.accuracy[j] < rep.accuracy[j - 1]) ++violations;
    }
  }
  return {exact && violations == 0,
          fmt("fixture acc@{1,5,10,15} = {%.2f, %.2f, %.2f, %.2f}; %d fuzzed inputs, %d decreases",
              r.at(1), r.at(5), r.at(10), r.at(15), fuzz, violations)};
}

Outcome sampling_law() {
  // Relation 0: one head, three tails (tph 3, hpt 1).
  // Relation 1: three heads, one tail (tph 1, hpt 3).
  // Relation 2: heads {0,1} x tails {0,1}, plus a duplicated (2, 3).
  std::vector<Triple> triples = {
      {0, 0, 0}, {0, 0, 1}, {0, 0, 2},
      {0, 1, 4}, {1, 1, 4}, {2, 1, 4},
      {0, 2, 0}, {0, 2, 1}, {1, 2, 0}, {1, 2, 1}, {2, 2, 3}, {2, 2, 3},
  };
  const TripleStore store(triples, 5, 3, 6);
  // Hand-counted distinct (h, t) pairs per relation:
  //   r0: heads {0} -> 3 tails, tails each 1 head: tph 3, hpt 1
  //   r1: heads each 1 tail, tail 4 has 3 heads: tph 1, hpt 3
  //   r2: pairs {00,01,10,11,23}: tph = 5/3, hpt = 5/3
  const std::map<Id, double> expected = {{0, 3.0 / 4.0}, {1, 1.0 / 4.0}, {2, 0.5}};
  double worst = 0.0;
  std::string detail;
  for (const auto& [r, want] : expected) {
    Rng rng(derive_seed(2024, "sampling", static_cast<std::uint64_t>(r)));
    const Triple pos = *std::find_if(triples.begin(), triples.end(),
                                     [r = r](const Triple& t) { return t.relation == r; });
    int heads = 0;
    for (int i = 0; i < kSamplingDraws; ++i) {
      heads += sample_negative(pos, store, Sampling::kBernoulli, rng).head_replaced ? 1 : 0;
    }
    const double freq = static_cast<double>(heads) / kSamplingDraws;
    worst = std::max(worst, std::abs(freq - want));
    detail += fmt("r%d %.4f vs %.4f; ", r, freq, want);
  }
  detail += fmt("max |diff| %.4f (<= %.2f) over %d draws each", worst, kSamplingTol, kSamplingDraws);
  return {worst <= kSamplingTol, detail};
}

Outcome sparsity_direction() {
  Stopwatch clock;
  int ok = 0;
  std::string deltas;
  for (int seed = 1; seed <= kSparsitySeeds; ++seed) {
    PlantedSpec spec;
    spec.seed = static_cast<std::uint64_t>(seed);
    const auto data = make_planted(spec);
    const std::vector<double> ratios = {kSparsityRatio};
    const auto table = run_sparsity_experiment(data.train, data.test, ratios,
                                               planted_config(7, 100), derive_seed(seed, "reduce"));
    const double base = table.baseline.at(1);
    const double reduced = table.rows.front().report.at(1);
    ok += reduced <= base + kSparsityNoise ? 1 : 0;
    deltas += fmt("%+.3f ", reduced - base);
  }
  // The published Table 5 pair, through the same formula.
  const double change = percent_change(0.307, 0.246);
  const double formula = (0.246 - 0.307) / 0.307 * 100.0;
  const std::string printed = format_percent(change);
  const bool fixture = std::abs(change - formula) < 1e-12 && std::round(change * 100.0) / 100.0 >= -20.00 &&
                       std::round(change * 100.0) / 100.0 <= -19.87 &&
                       printed == "-19.87%";
  return {ok >= kSparsityRequired && fixture,
          fmt("%d/%d seeds with acc@1 drop or within +%.2f (need %d), deltas [%s]; 0.307->0.246 = %s; %.1fs",
              ok, kSparsitySeeds, kSparsityNoise, kSparsityRequired, deltas.c_str(), printed.c_str(),
              clock.seconds())};
}

Outcome coldstart_efficacy() {
  Stopwatch clock;
  int wins = 0;
  std::string detail;
  for (int seed = 1; seed <= kColdSeeds; ++seed) {
    PlantedCheckinSpec spec;
    spec.cold_per_group = 1;
    spec.seed = static_cast<std::uint64_t>(seed);
    const auto checkins = make_planted_checkins(spec);
    PipelineSettings settings;
    settings.discretizer.num_regions = spec.regions;
    settings.discretizer.seed = static_cast<std::uint64_t>(seed);
    const auto r = run_coldstart_experiment(checkins, settings,
                                            planted_config(static_cast<std::uint64_t>(seed), 200), 5);
    wins += r.sta_c.at(5) > r.sta.at(5) ? 1 : 0;
    detail += fmt("%.3f/%.3f ", r.sta_c.at(5), r.sta.at(5));
  }
  const double s = clock.seconds();
  return {wins >= kColdRequired && s < kColdSeconds,
          fmt("STA-C beats STA on cold acc@5 in %d/%d seeds (need %d) [STA-C/STA: %s], %.1fs (< %gs)",
              wins, kColdSeeds, kColdRequired, detail.c_str(), s, kColdSeconds)};
}

int run_cli(std::vector<std::string> args) {
  std::vector<const char*> argv = {"sta"};
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

Outcome determinism() {
  const fs::path root = oracle::scratch_dir("acceptance_determinism");
  PlantedCheckinSpec spec;
  spec.seed = 4;
  {
    std::ofstream csv(root / "checkins.csv");
    write_checkins_csv(csv, make_planted_checkins(spec));
  }
  bool ran = true;
  for (const char* run : {"a", "b"}) {
    const std::string out = (root / run).string();
    const std::string in = (root / "checkins.csv").string();
    const std::vector<std::string> common = {"--output", out, "--seed", "42", "--regions", "4"};
    auto with = [&](std::vector<std::string> head) {
      head.insert(head.end(), common.begin(), common.end());
      return head;
    };
    ran = ran && run_cli(with({"preprocess", "--input", in})) == 0;
    ran = ran && run_cli(with({"train", "--epochs", "5", "--dims", "16", "--batch", "200", "--lr", "0.001"})) == 0;
    ran = ran && run_cli(with({"evaluate"})) == 0;
  }
  std::string differing;
  for (const char* file : {"model.sta", "eval.json", "vocab.tsv", "triples.tsv", "split.tsv"}) {
    const auto a = oracle::read_bytes(root / "a" / file);
    const auto b = oracle::read_bytes(root / "b" / file);
    if (a.empty() || a != b) differing += std::string(file) + " ";
  }
  fs::remove_all(root);
  return {ran && differing.empty(),
          ran ? (differing.empty() ? "model.sta and eval.json (and ingest artifacts) byte-identical across two runs"
                                   : "differing: " + differing)
              : "a CLI step failed"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gradient oracle", gradient_oracle},
      {"constraint audit", constraint_audit},
      {"planted-structure recovery", planted_recovery},
      {"variant reduction", variant_reduction},
      {"ranking oracle", ranking_oracle},
      {"evaluation arithmetic", evaluation_arithmetic},
      {"negative-sampling law", sampling_law},
      {"sparsity direction", sparsity_direction},
      {"cold-start efficacy", coldstart_efficacy},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
