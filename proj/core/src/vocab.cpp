#include "sta/vocab.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "sta/error.hpp"

namespace sta {

Id Dictionary::intern(std::string_view key) {
  auto it = ids_.find(std::string(key));
  if (it == ids_.end()) {
    const Id id = size();
    keys_.emplace_back(key);
    counts_.push_back(0);
    it = ids_.emplace(keys_.back(), id).first;
  }
  ++counts_[static_cast<std::size_t>(it->second)];
  return it->second;
}

std::optional<Id> Dictionary::find(std::string_view key) const {
  const auto it = ids_.find(std::string(key));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::string pattern_key(const Pattern& p) {
  return std::to_string(p.slot) + ":" + std::to_string(p.region);
}

std::optional<Pattern> parse_pattern_key(std::string_view key) {
  const auto colon = key.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  Pattern p;
  const auto a = key.substr(0, colon);
  const auto b = key.substr(colon + 1);
  auto r1 = std::from_chars(a.data(), a.data() + a.size(), p.slot);
  auto r2 = std::from_chars(b.data(), b.data() + b.size(), p.region);
  if (r1.ec != std::errc{} || r1.ptr != a.data() + a.size()) return std::nullopt;
  if (r2.ec != std::errc{} || r2.ptr != b.data() + b.size()) return std::nullopt;
  return p;
}

void Vocab::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  auto dump = [&](const char* kind, const Dictionary& d) {
    for (Id i = 0; i < d.size(); ++i) out << kind << '\t' << d.key(i) << '\t' << i << '\n';
  };
  dump("user", users);
  dump("poi", pois);
  dump("relation", relations);
  dump("content", content);
  if (!out) throw Error("failed writing " + path.string());
}

Vocab Vocab::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError(path.string());
  Vocab v;
  std::string line;
  while (std::getline(in, line)) {
    const auto t1 = line.find('\t');
    const auto t2 = line.rfind('\t');
    if (t1 == std::string::npos || t1 == t2) throw DataError("bad vocab line: " + line);
    const std::string kind = line.substr(0, t1);
    const std::string key = line.substr(t1 + 1, t2 - t1 - 1);
    const Id id = static_cast<Id>(std::stol(line.substr(t2 + 1)));
    Dictionary* d = kind == "user"       ? &v.users
                    : kind == "poi"      ? &v.pois
                    : kind == "relation" ? &v.relations
                    : kind == "content"  ? &v.content
                                         : nullptr;
    if (d == nullptr) throw DataError("bad vocab kind: " + kind);
    if (d->intern(key) != id) throw DataError("vocab ids are not contiguous at: " + line);
  }
  return v;
}

std::size_t TripleHash::operator()(const Triple& t) const noexcept {
  std::uint64_t h = static_cast<std::uint32_t>(t.head);
  h = h * 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint32_t>(t.relation);
  h = h * 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint32_t>(t.tail);
  return static_cast<std::size_t>(h ^ (h >> 29));
}

TripleStore::TripleStore(std::vector<Triple> triples, Id num_heads, Id num_relations, Id num_tails)
    : triples_(std::move(triples)),
      num_heads_(num_heads),
      num_relations_(num_relations),
      num_tails_(num_tails),
      tph_(static_cast<std::size_t>(num_relations), 0.0),
      hpt_(static_cast<std::size_t>(num_relations), 0.0) {
  for (const auto& t : triples_) {
    if (t.head < 0 || t.head >= num_heads || t.relation < 0 || t.relation >= num_relations ||
        t.tail < 0 || t.tail >= num_tails) {
      throw DataError("triple id out of vocabulary bounds");
    }
  }
  index_.reserve(triples_.size());
  index_.insert(triples_.begin(), triples_.end());

  // Statistics over distinct (head, tail) pairs per relation.
  std::vector<std::set<Id>> heads(num_relations), tails(num_relations);
  std::vector<std::size_t> pairs(num_relations, 0);
  for (const auto& t : index_) {
    heads[t.relation].insert(t.head);
    tails[t.relation].insert(t.tail);
    ++pairs[t.relation];
  }
  for (Id r = 0; r < num_relations; ++r) {
    if (pairs[r] == 0) continue;
    tph_[r] = static_cast<double>(pairs[r]) / static_cast<double>(heads[r].size());
    hpt_[r] = static_cast<double>(pairs[r]) / static_cast<double>(tails[r].size());
  }
}

void TripleStore::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& t : triples_) out << t.head << '\t' << t.relation << '\t' << t.tail << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

TripleStore TripleStore::load(const std::filesystem::path& path, Id num_heads, Id num_relations,
                              Id num_tails) {
  std::ifstream in(path);
  if (!in) throw MissingInputError(path.string());
  std::vector<Triple> triples;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    Triple t;
    if (!(fields >> t.head >> t.relation >> t.tail)) throw DataError("bad triple line: " + line);
    triples.push_back(t);
  }
  return TripleStore(std::move(triples), num_heads, num_relations, num_tails);
}

TripleStore build_triples(std::span<const CheckIn> checkins, const Discretizer& disc, Vocab& vocab) {
  std::vector<Triple> triples;
  triples.reserve(checkins.size());
  for (const auto& c : checkins) {
    const Pattern p{disc.slot(c.timestamp), disc.region(c.poi, {c.lat, c.lon})};
    triples.push_back(
        {vocab.users.intern(c.user), vocab.relations.intern(pattern_key(p)), vocab.pois.intern(c.poi)});
  }
  return TripleStore(std::move(triples), vocab.users.size(), vocab.relations.size(),
                     vocab.pois.size());
}

TripleBuild build_triples(std::span<const CheckIn> checkins, const Discretizer& disc) {
  TripleBuild out;
  out.store = build_triples(checkins, disc, out.vocab);
  return out;
}

}  // namespace sta
