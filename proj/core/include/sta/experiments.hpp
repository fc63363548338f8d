#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sta/checkin.hpp"
#include "sta/evaluate.hpp"
#include "sta/pipeline.hpp"
#include "sta/trainer.hpp"

namespace sta {

/// Relative change in percent: (after - before) / before * 100.
double percent_change(double before, double after);
/// Two decimals and a percent sign, e.g. "-19.87%".
std::string format_percent(double percent);

struct ExperimentRow {
  std::string label;
  EvalReport report;
};

/// CSV with header "<label_header>,acc@1,acc@5,...".
void write_accuracy_csv(std::ostream& out, std::string_view label_header,
                        std::span<const ExperimentRow> rows);

/// Drops floor(ratio * n) triples chosen uniformly at random.
TripleStore reduce_triples(const TripleStore& store, double ratio, std::uint64_t seed);

struct SparsityRow {
  double ratio = 0.0;
  EvalReport report;
};

struct SparsityTable {
  EvalReport baseline;
  std::vector<SparsityRow> rows;

  /// "ratio,k,acc,acc_reduced,change" with change as a two-decimal percent.
  void write_csv(std::ostream& out) const;
};

/// Retrains on reduced copies of `train` (same training seed every time) and
/// evaluates on the unchanged `test`.
SparsityTable run_sparsity_experiment(const TripleStore& train, std::span<const LabeledQuery> test,
                                      std::span<const double> ratios, const TrainConfig& config,
                                      std::uint64_t reduction_seed);

/// Cold-start split: POIs with fewer than `threshold` distinct visitors are
/// cold; every check-in at a cold POI is a test record, everything else is
/// training. Throws DataError when no POI is cold.
Split cold_start_split(std::span<const CheckIn> checkins, int threshold);

struct ColdStartResult {
  EvalReport sta;
  EvalReport sta_c;
  std::size_t cold_pois = 0;

  /// "model,acc@1,..." rows STA and STA-C.
  void write_csv(std::ostream& out) const;
};

/// Trains the check-in-only model and the joint content model on the
/// cold-start split and evaluates both on cold-start test records only.
ColdStartResult run_coldstart_experiment(std::span<const CheckIn> checkins,
                                         const PipelineSettings& settings,
                                         const TrainConfig& config, int threshold = 5);

/// STA (TransR), STA-H and STA-E on the same prepared data.
std::vector<ExperimentRow> run_variant_sweep(const PreparedData& data, const TrainConfig& config);

/// One TransR run per dimension (d = m).
std::vector<ExperimentRow> run_dimension_sweep(const PreparedData& data, const TrainConfig& config,
                                               std::span<const int> dims);

/// Re-prepares the data with 24, 7 and 2 time slots.
std::vector<ExperimentRow> run_timeslot_sweep(std::span<const CheckIn> checkins,
                                              const PipelineSettings& settings,
                                              const TrainConfig& config);

}  // namespace sta
