#include "sta/pipeline.hpp"

#include <fstream>
#include <sstream>

#include "sta/error.hpp"

namespace sta {
namespace {

struct QuerySet {
  std::vector<LabeledQuery> queries;
  std::vector<Resolution> how;
};

QuerySet make_queries(std::span<const CheckIn> checkins, std::span<const std::size_t> indices,
                      const Vocab& vocab, const PatternIndex& index) {
  QuerySet out;
  for (std::size_t i : indices) {
    const auto& c = checkins[i];
    const auto resolved = index.resolve(c.timestamp, {c.lat, c.lon});
    LabeledQuery q;
    q.user = *vocab.users.find(c.user);
    q.truth = *vocab.pois.find(c.poi);
    q.relation = resolved.relation;
    out.queries.push_back(q);
    out.how.push_back(resolved.how);
  }
  return out;
}

}  // namespace

void DatasetStats::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "users\t" << users << '\n'
      << "pois\t" << pois << '\n'
      << "checkins\t" << checkins << '\n'
      << "time_slots\t" << time_slots << '\n'
      << "locations\t" << locations << '\n'
      << "patterns\t" << patterns << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

PreparedData prepare(std::span<const CheckIn> checkins, const PipelineSettings& settings) {
  return prepare_with_split(checkins, split_by_user(checkins, settings.split), settings);
}

PreparedData prepare_with_split(std::span<const CheckIn> checkins, Split split,
                                const PipelineSettings& settings) {
  if (checkins.empty()) throw DataError("no check-ins to prepare");
  if (split.labels.size() != checkins.size()) throw DataError("split does not cover every record");
  PreparedData out;
  out.split = std::move(split);

  const auto train_idx = out.split.indices(SplitLabel::kTrain);
  if (train_idx.empty()) throw DataError("split left no training records");
  std::vector<CheckIn> train_records;
  std::vector<std::pair<std::string, Coord>> train_points;
  train_records.reserve(train_idx.size());
  for (std::size_t i : train_idx) {
    train_records.push_back(checkins[i]);
    train_points.emplace_back(checkins[i].poi, Coord{checkins[i].lat, checkins[i].lon});
  }
  out.disc = Discretizer::fit(settings.discretizer, train_points);

  TripleStore provisional = build_triples(train_records, out.disc, out.vocab);
  for (const auto& c : checkins) {
    if (!out.vocab.users.find(c.user)) out.vocab.users.intern(c.user);
    if (!out.vocab.pois.find(c.poi)) out.vocab.pois.intern(c.poi);
  }
  out.train = TripleStore(std::vector<Triple>(provisional.triples().begin(), provisional.triples().end()),
                          out.vocab.users.size(), out.vocab.relations.size(), out.vocab.pois.size());

  const PatternIndex index(out.disc, out.vocab.relations);
  auto valid = make_queries(checkins, out.split.indices(SplitLabel::kValidation), out.vocab, index);
  auto test = make_queries(checkins, out.split.indices(SplitLabel::kTest), out.vocab, index);
  out.validation = std::move(valid.queries);
  out.validation_how = std::move(valid.how);
  out.test = std::move(test.queries);
  out.test_how = test.how;
  for (Resolution r : test.how) {
    switch (r) {
      case Resolution::kExact: ++out.test_resolution.exact; break;
      case Resolution::kNearestRegion: ++out.test_resolution.nearest_region; break;
      case Resolution::kSameRegion: ++out.test_resolution.same_region; break;
      case Resolution::kUnanswerable: ++out.test_resolution.unanswerable; break;
    }
  }

  if (settings.content) {
    const PoiContent content = collect_poi_content(checkins, out.vocab, out.disc);
    out.content = build_content_triples(content, out.vocab.content, settings.content_options);
  } else {
    out.content = TripleStore({}, out.vocab.pois.size(), 0, out.vocab.pois.size());
  }

  out.stats.users = static_cast<std::size_t>(out.vocab.users.size());
  out.stats.pois = static_cast<std::size_t>(out.vocab.pois.size());
  out.stats.checkins = checkins.size();
  out.stats.time_slots = static_cast<std::size_t>(num_slots(out.disc.time_scheme()));
  out.stats.locations = static_cast<std::size_t>(out.disc.regions().size());
  out.stats.patterns = static_cast<std::size_t>(out.vocab.relations.size());
  return out;
}

void save_queries(const std::filesystem::path& path, std::span<const LabeledQuery> queries,
                  std::span<const Resolution> how) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto& q = queries[i];
    out << q.user << '\t' << (q.relation ? *q.relation : -1) << '\t' << q.truth << '\t'
        << (i < how.size() ? to_string(how[i]) : (q.relation ? "exact" : "unanswerable")) << '\n';
  }
  if (!out) throw Error("failed writing " + path.string());
}

std::vector<LabeledQuery> load_queries(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError(path.string());
  std::vector<LabeledQuery> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    LabeledQuery q;
    Id relation = -1;
    if (!(fields >> q.user >> relation >> q.truth)) throw DataError("bad query line: " + line);
    if (relation >= 0) q.relation = relation;
    out.push_back(q);
  }
  return out;
}

}  // namespace sta
