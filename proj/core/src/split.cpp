#include "sta/split.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include "sta/error.hpp"

namespace sta {

std::string_view to_string(SplitLabel label) {
  switch (label) {
    case SplitLabel::kTrain: return "train";
    case SplitLabel::kValidation: return "validation";
    case SplitLabel::kTest: return "test";
    case SplitLabel::kRemoved: return "removed";
  }
  return "?";
}

std::vector<std::size_t> Split::indices(SplitLabel label) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) out.push_back(i);
  }
  return out;
}

std::size_t Split::count(SplitLabel label) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

void Split::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << '\t' << to_string(labels[i]) << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

std::size_t fraction_floor(double ratio, std::size_t n) {
  return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9));
}

std::vector<std::size_t> choose_indices(std::size_t n, std::size_t count, Rng& rng) {
  count = std::min(count, n);
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

Split split_by_user(std::span<const CheckIn> checkins, const SplitSpec& spec) {
  if (spec.train_fraction <= 0.0 || spec.train_fraction > 1.0) {
    throw ConfigError("train fraction must be in (0, 1]");
  }
  if (spec.valid_fraction < 0.0 || spec.valid_fraction >= 1.0) {
    throw ConfigError("validation fraction must be in [0, 1)");
  }
  if (spec.reduction < 0.0 || spec.reduction >= 1.0) {
    throw ConfigError("reduction ratio must be in [0, 1)");
  }

  std::vector<std::string_view> order;
  std::unordered_map<std::string_view, std::vector<std::size_t>> by_user;
  for (std::size_t i = 0; i < checkins.size(); ++i) {
    auto [it, inserted] = by_user.try_emplace(checkins[i].user);
    if (inserted) order.push_back(checkins[i].user);
    it->second.push_back(i);
  }

  Split split;
  split.labels.assign(checkins.size(), SplitLabel::kTrain);
  for (const auto user : order) {
    auto& records = by_user[user];
    std::stable_sort(records.begin(), records.end(), [&](std::size_t a, std::size_t b) {
      return checkins[a].timestamp < checkins[b].timestamp;
    });
    const std::size_t n = records.size();
    if (n < 2) {
      split.warnings.push_back("user " + std::string(user) + " has " + std::to_string(n) +
                               " record(s); all kept in training");
      continue;
    }
    const std::size_t n_train = fraction_floor(spec.train_fraction, n);
    const std::size_t n_valid = fraction_floor(spec.valid_fraction, n_train);
    for (std::size_t j = n_train - n_valid; j < n_train; ++j) {
      split.labels[records[j]] = SplitLabel::kValidation;
    }
    for (std::size_t j = n_train; j < n; ++j) split.labels[records[j]] = SplitLabel::kTest;
  }

  if (spec.reduction > 0.0) {
    const auto train = split.indices(SplitLabel::kTrain);
    Rng rng(spec.seed);
    for (std::size_t pick : choose_indices(train.size(), fraction_floor(spec.reduction, train.size()), rng)) {
      split.labels[train[pick]] = SplitLabel::kRemoved;
    }
  }
  return split;
}

}  // namespace sta
