#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sta/checkin.hpp"
#include "sta/rng.hpp"

namespace sta {

struct SplitSpec {
  double train_fraction = 0.8;
  /// Fraction of each user's training portion, taken from its end.
  double valid_fraction = 0.1;
  /// Share of training records dropped at random (sparsity study); test and
  /// validation records are never touched.
  double reduction = 0.0;
  std::uint64_t seed = 0;
};

enum class SplitLabel { kTrain, kValidation, kTest, kRemoved };

std::string_view to_string(SplitLabel label);

struct Split {
  /// Label of every input record, by input index.
  std::vector<SplitLabel> labels;
  std::vector<std::string> warnings;

  std::vector<std::size_t> indices(SplitLabel label) const;
  std::size_t count(SplitLabel label) const;

  /// Manifest TSV: "record-index\tlabel".
  void save(const std::filesystem::path& path) const;
};

/// Per-user chronological split. Records of one user are ordered by
/// timestamp (stable on input order); the first floor(train_fraction * n)
/// are training, the last floor(valid_fraction * n_train) of those become
/// validation, the rest are test. Users with fewer than two records keep
/// everything in training.
Split split_by_user(std::span<const CheckIn> checkins, const SplitSpec& spec);

/// floor(ratio * n), robust to representation error in the ratio.
std::size_t fraction_floor(double ratio, std::size_t n);

/// `count` distinct indices out of [0, n), uniformly at random, ascending.
std::vector<std::size_t> choose_indices(std::size_t n, std::size_t count, Rng& rng);

}  // namespace sta
