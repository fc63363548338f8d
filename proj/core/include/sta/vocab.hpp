#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sta/checkin.hpp"
#include "sta/discretize.hpp"

namespace sta {

using Id = std::int32_t;

/// Bidirectional key <-> dense id map. Ids are assigned in first-seen order
/// starting at 0.
class Dictionary {
 public:
  /// Returns the id of `key`, adding it if new, and bumps its count.
  Id intern(std::string_view key);
  std::optional<Id> find(std::string_view key) const;
  const std::string& key(Id id) const { return keys_.at(static_cast<std::size_t>(id)); }
  std::int64_t count(Id id) const { return counts_.at(static_cast<std::size_t>(id)); }
  Id size() const { return static_cast<Id>(keys_.size()); }
  const std::vector<std::string>& keys() const { return keys_; }

  bool operator==(const Dictionary& other) const { return keys_ == other.keys_; }

 private:
  std::vector<std::string> keys_;
  std::vector<std::int64_t> counts_;
  std::unordered_map<std::string, Id> ids_;
};

/// A spatiotemporal pattern: one (time slot, region) pair.
struct Pattern {
  int slot = 0;
  int region = 0;
  auto operator<=>(const Pattern&) const = default;
};

std::string pattern_key(const Pattern& p);
std::optional<Pattern> parse_pattern_key(std::string_view key);

/// Vocabularies for every id space the model embeds.
struct Vocab {
  Dictionary users;
  Dictionary pois;
  Dictionary relations;  // spatiotemporal <t, l> patterns, keyed "slot:region"
  Dictionary content;    // <word, location> patterns, keyed "word@region"

  /// TSV lines "kind\tkey\tid" for kind in {user, poi, relation, content}.
  void save(const std::filesystem::path& path) const;
  static Vocab load(const std::filesystem::path& path);

  bool operator==(const Vocab&) const = default;
};

struct Triple {
  Id head = 0;
  Id relation = 0;
  Id tail = 0;
  auto operator<=>(const Triple&) const = default;
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const noexcept;
};

/// Training triples with per-relation corruption statistics and an O(1)
/// membership index. Heads and tails live in separate id spaces (users and
/// POIs for check-in triples, POIs and POIs for content triples).
class TripleStore {
 public:
  TripleStore() = default;
  /// Throws DataError if any id is outside its bound.
  TripleStore(std::vector<Triple> triples, Id num_heads, Id num_relations, Id num_tails);

  std::span<const Triple> triples() const { return triples_; }
  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }
  bool contains(const Triple& t) const { return index_.contains(t); }

  Id num_heads() const { return num_heads_; }
  Id num_relations() const { return num_relations_; }
  Id num_tails() const { return num_tails_; }

  /// Mean distinct tails per head for relation r (0 when r is unused).
  double tph(Id r) const { return tph_.at(static_cast<std::size_t>(r)); }
  /// Mean distinct heads per tail for relation r (0 when r is unused).
  double hpt(Id r) const { return hpt_.at(static_cast<std::size_t>(r)); }

  void save(const std::filesystem::path& path) const;
  static TripleStore load(const std::filesystem::path& path, Id num_heads, Id num_relations,
                          Id num_tails);

 private:
  std::vector<Triple> triples_;
  Id num_heads_ = 0;
  Id num_relations_ = 0;
  Id num_tails_ = 0;
  std::vector<double> tph_;
  std::vector<double> hpt_;
  std::unordered_set<Triple, TripleHash> index_;
};

struct TripleBuild {
  Vocab vocab;
  TripleStore store;
};

/// One triple per check-in; the relation is the check-in's (slot, region)
/// pattern under `disc`.
TripleBuild build_triples(std::span<const CheckIn> checkins, const Discretizer& disc);

/// Same, but extends an existing vocabulary.
TripleStore build_triples(std::span<const CheckIn> checkins, const Discretizer& disc, Vocab& vocab);

}  // namespace sta
