#include "sta/experiments.hpp"

#include <cstdio>
#include <ostream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "sta/coldstart.hpp"
#include "sta/error.hpp"
#include "sta/split.hpp"

namespace sta {
namespace {

std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

EvalReport train_and_evaluate(const TripleStore& train, std::span<const LabeledQuery> test,
                              const TrainConfig& config) {
  return evaluate(sta::train(train, config).params, test);
}

}  // namespace

double percent_change(double before, double after) { return (after - before) / before * 100.0; }

std::string format_percent(double percent) { return format_fixed(percent, 2) + "%"; }

void write_accuracy_csv(std::ostream& out, std::string_view label_header,
                        std::span<const ExperimentRow> rows) {
  out << label_header;
  if (!rows.empty()) {
    for (int k : rows.front().report.ks) out << ",acc@" << k;
  }
  out << '\n';
  for (const auto& row : rows) {
    out << row.label;
    for (double a : row.report.accuracy) out << ',' << format_fixed(a, 6);
    out << '\n';
  }
}

TripleStore reduce_triples(const TripleStore& store, double ratio, std::uint64_t seed) {
  if (ratio < 0.0 || ratio >= 1.0) throw ConfigError("reduction ratio must be in [0, 1)");
  Rng rng(seed);
  const auto drop = choose_indices(store.size(), fraction_floor(ratio, store.size()), rng);
  std::vector<Triple> kept;
  kept.reserve(store.size() - drop.size());
  std::size_t next = 0;
  for (std::size_t i = 0; i < store.size(); ++i) {
    if (next < drop.size() && drop[next] == i) {
      ++next;
      continue;
    }
    kept.push_back(store.triples()[i]);
  }
  return TripleStore(std::move(kept), store.num_heads(), store.num_relations(), store.num_tails());
}

void SparsityTable::write_csv(std::ostream& out) const {
  out << "ratio,k,acc,acc_reduced,change\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.report.ks.size(); ++i) {
      const double before = baseline.accuracy[i];
      const double after = row.report.accuracy[i];
      out << format_fixed(row.ratio, 2) << ',' << row.report.ks[i] << ',' << format_fixed(before, 6)
          << ',' << format_fixed(after, 6) << ','
          << (before > 0.0 ? format_percent(percent_change(before, after)) : std::string("nan"))
          << '\n';
    }
  }
}

SparsityTable run_sparsity_experiment(const TripleStore& train, std::span<const LabeledQuery> test,
                                      std::span<const double> ratios, const TrainConfig& config,
                                      std::uint64_t reduction_seed) {
  SparsityTable table;
  table.baseline = train_and_evaluate(train, test, config);
  for (double ratio : ratios) {
    SparsityRow row;
    row.ratio = ratio;
    row.report = ratio == 0.0 ? table.baseline
                              : train_and_evaluate(reduce_triples(train, ratio, reduction_seed),
                                                   test, config);
    table.rows.push_back(std::move(row));
  }
  return table;
}

Split cold_start_split(std::span<const CheckIn> checkins, int threshold) {
  std::unordered_map<std::string_view, std::unordered_set<std::string_view>> visitors;
  for (const auto& c : checkins) visitors[c.poi].insert(c.user);
  Split split;
  split.labels.assign(checkins.size(), SplitLabel::kTrain);
  std::size_t cold = 0;
  for (std::size_t i = 0; i < checkins.size(); ++i) {
    if (static_cast<int>(visitors[checkins[i].poi].size()) < threshold) {
      split.labels[i] = SplitLabel::kTest;
      ++cold;
    }
  }
  if (cold == 0) {
    throw DataError("no cold-start POIs: every POI has at least " + std::to_string(threshold) +
                    " distinct visitors; raise the cold-start threshold");
  }
  return split;
}

void ColdStartResult::write_csv(std::ostream& out) const {
  const ExperimentRow rows[] = {{"STA", sta}, {"STA-C", sta_c}};
  write_accuracy_csv(out, "model", rows);
}

ColdStartResult run_coldstart_experiment(std::span<const CheckIn> checkins,
                                         const PipelineSettings& settings,
                                         const TrainConfig& config, int threshold) {
  PipelineSettings with_content = settings;
  with_content.content = true;
  const PreparedData data =
      prepare_with_split(checkins, cold_start_split(checkins, threshold), with_content);

  ColdStartResult result;
  std::set<Id> cold;
  for (const auto& q : data.test) cold.insert(q.truth);
  result.cold_pois = cold.size();
  result.sta = evaluate(train(data.train, config).params, data.test);
  result.sta_c = evaluate(train_coldstart(data.train, data.content, config).params, data.test);
  return result;
}

std::vector<ExperimentRow> run_variant_sweep(const PreparedData& data, const TrainConfig& config) {
  std::vector<ExperimentRow> rows;
  for (auto [label, variant] : {std::pair{"STA", Variant::kTransR}, std::pair{"STA-H", Variant::kTransH},
                                std::pair{"STA-E", Variant::kTransE}}) {
    TrainConfig c = config;
    c.variant = variant;
    if (variant != Variant::kTransR) c.rel_dim = c.dim;
    rows.push_back({label, train_and_evaluate(data.train, data.test, c)});
  }
  return rows;
}

std::vector<ExperimentRow> run_dimension_sweep(const PreparedData& data, const TrainConfig& config,
                                               std::span<const int> dims) {
  std::vector<ExperimentRow> rows;
  for (int d : dims) {
    TrainConfig c = config;
    c.variant = Variant::kTransR;
    c.dim = d;
    c.rel_dim = d;
    rows.push_back({std::to_string(d), train_and_evaluate(data.train, data.test, c)});
  }
  return rows;
}

std::vector<ExperimentRow> run_timeslot_sweep(std::span<const CheckIn> checkins,
                                              const PipelineSettings& settings,
                                              const TrainConfig& config) {
  std::vector<ExperimentRow> rows;
  for (TimeScheme scheme :
       {TimeScheme::kHourly, TimeScheme::kDayOfWeek, TimeScheme::kWeekdayWeekend}) {
    PipelineSettings s = settings;
    s.discretizer.time_scheme = scheme;
    const PreparedData data = prepare(checkins, s);
    rows.push_back({std::to_string(num_slots(scheme)), train_and_evaluate(data.train, data.test, config)});
  }
  return rows;
}

}  // namespace sta
