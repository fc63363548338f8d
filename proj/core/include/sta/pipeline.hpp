#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "sta/checkin.hpp"
#include "sta/coldstart.hpp"
#include "sta/discretize.hpp"
#include "sta/evaluate.hpp"
#include "sta/recommend.hpp"
#include "sta/split.hpp"
#include "sta/vocab.hpp"

namespace sta {

/// Everything needed to turn raw check-ins into model inputs.
struct PipelineSettings {
  DiscretizerSpec discretizer;
  SplitSpec split;
  /// Also build POI -> POI content triples (cold-start model).
  bool content = false;
  ContentOptions content_options;
};

/// The dataset statistics reported after preprocessing.
struct DatasetStats {
  std::size_t users = 0;
  std::size_t pois = 0;
  std::size_t checkins = 0;
  std::size_t time_slots = 0;
  std::size_t locations = 0;
  std::size_t patterns = 0;

  /// Six "field\tvalue" lines.
  void save(const std::filesystem::path& path) const;
};

struct ResolutionCounts {
  std::size_t exact = 0;
  std::size_t nearest_region = 0;
  std::size_t same_region = 0;
  std::size_t unanswerable = 0;
};

struct PreparedData {
  Vocab vocab;
  Discretizer disc;
  Split split;
  TripleStore train;
  TripleStore content;  // empty unless settings.content
  std::vector<LabeledQuery> validation;
  std::vector<LabeledQuery> test;
  std::vector<Resolution> validation_how;  // parallel to validation
  std::vector<Resolution> test_how;        // parallel to test
  ResolutionCounts test_resolution;
  DatasetStats stats;
};

/// Splits per user, fits the discretiser on the training records only,
/// builds vocabularies (training records first, so their ids come first),
/// training triples, and queries for validation and test records.
PreparedData prepare(std::span<const CheckIn> checkins, const PipelineSettings& settings);

/// Same, with a caller-supplied split.
PreparedData prepare_with_split(std::span<const CheckIn> checkins, Split split,
                                const PipelineSettings& settings);

/// Labeled queries file: "user\trelation\ttruth\tresolution", relation -1
/// when unanswerable.
void save_queries(const std::filesystem::path& path, std::span<const LabeledQuery> queries,
                  std::span<const Resolution> how);
std::vector<LabeledQuery> load_queries(const std::filesystem::path& path);

}  // namespace sta
