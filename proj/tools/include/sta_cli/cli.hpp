#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sta/checkin.hpp"
#include "sta/coldstart.hpp"
#include "sta/discretize.hpp"
#include "sta/pipeline.hpp"
#include "sta/split.hpp"
#include "sta/trainer.hpp"

namespace sta::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitUnanswerable = 3;

/// Everything a subcommand needs. Defaults are the published settings.
struct RunConfig {
  std::filesystem::path input;
  std::filesystem::path content_file;
  std::filesystem::path region_file;
  std::filesystem::path output = "sta_out";
  std::filesystem::path model;  // empty: <output>/model.sta
  std::string format = "user,poi,lat,lon,timestamp,words";
  char delimiter = ',';

  TimeScheme time_scheme = TimeScheme::kHourly;
  std::int64_t utc_offset_seconds = 0;
  int regions = 200;

  double train_fraction = 0.8;
  double valid_fraction = 0.1;
  double reduction = 0.0;

  TrainConfig train;
  int checkpoint_every = 100;

  bool content = false;
  std::size_t pair_budget = 50;
  int cold_threshold = 5;

  std::vector<int> ks = {1, 5, 10, 15, 20};
  std::vector<int> sweep_dims = {70, 80, 90, 100, 110, 120};
  std::vector<double> sparsity_ratios = {0.05, 0.10, 0.15, 0.20};
  std::size_t k = 10;

  std::uint64_t seed = 0;

  std::filesystem::path model_path() const;
  /// Component settings with seeds fanned out from `seed` by name.
  PipelineSettings pipeline() const;
  TrainConfig training() const;
  ParseOptions parse_options() const;
};

/// Applies one `key = value` setting. Throws ConfigError on an unknown key
/// or a malformed value.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Reads a flat TOML-like key/value file on top of `config`.
void load_config_file(RunConfig& config, const std::filesystem::path& path);

/// The keys apply_setting understands.
std::span<const std::string_view> config_keys();

void cmd_preprocess(const RunConfig& config, std::ostream& out, std::ostream& err);
void cmd_train(const RunConfig& config, bool resume, std::ostream& out, std::ostream& err);
void cmd_evaluate(const RunConfig& config, std::string_view split, std::ostream& out);
/// Returns the exit code: kExitOk, or kExitUnanswerable when the query's
/// pattern cannot be mapped onto any trained relation.
int cmd_recommend(const RunConfig& config, std::string_view user, std::int64_t timestamp,
                  const Coord& coord, std::ostream& out, std::ostream& err);
void cmd_experiment(const RunConfig& config, std::string_view which, std::ostream& out,
                    std::ostream& err);

/// Full command line entry point; never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sta::cli
