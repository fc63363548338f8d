#include "sta/discretize.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "sta/error.hpp"
#include "sta/rng.hpp"

namespace sta {
namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) { return a - floor_div(a, b) * b; }

std::optional<Coord> parse_coord_key(std::string_view key) {
  const auto comma = key.find(',');
  if (comma == std::string_view::npos) return std::nullopt;
  Coord c;
  auto lat = key.substr(0, comma);
  auto lon = key.substr(comma + 1);
  auto r1 = std::from_chars(lat.data(), lat.data() + lat.size(), c.lat);
  auto r2 = std::from_chars(lon.data(), lon.data() + lon.size(), c.lon);
  if (r1.ec != std::errc{} || r1.ptr != lat.data() + lat.size()) return std::nullopt;
  if (r2.ec != std::errc{} || r2.ptr != lon.data() + lon.size()) return std::nullopt;
  return c;
}

std::vector<int> assign_all(std::span<const Coord> points, const std::vector<Coord>& centroids) {
  std::vector<int> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      const double d = sq_distance(points[i], centroids[c]);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    out[i] = best;
  }
  return out;
}

}  // namespace

int num_slots(TimeScheme scheme) {
  switch (scheme) {
    case TimeScheme::kHourly: return 24;
    case TimeScheme::kDayOfWeek: return 7;
    case TimeScheme::kWeekdayWeekend: return 2;
  }
  return 0;
}

std::string_view to_string(TimeScheme scheme) {
  switch (scheme) {
    case TimeScheme::kHourly: return "hourly";
    case TimeScheme::kDayOfWeek: return "day-of-week";
    case TimeScheme::kWeekdayWeekend: return "weekday-weekend";
  }
  return "?";
}

TimeScheme parse_time_scheme(std::string_view name) {
  if (name == "hourly" || name == "24") return TimeScheme::kHourly;
  if (name == "day-of-week" || name == "dow" || name == "7") return TimeScheme::kDayOfWeek;
  if (name == "weekday-weekend" || name == "weekend" || name == "2") {
    return TimeScheme::kWeekdayWeekend;
  }
  throw ConfigError("unknown time scheme: '" + std::string(name) + "'");
}

int discretize_time(std::int64_t timestamp, TimeScheme scheme, std::int64_t utc_offset_seconds) {
  const std::int64_t local = timestamp + utc_offset_seconds;
  switch (scheme) {
    case TimeScheme::kHourly:
      return static_cast<int>(floor_mod(local, 86400) / 3600);
    case TimeScheme::kDayOfWeek:
    case TimeScheme::kWeekdayWeekend: {
      // 1970-01-01 was a Thursday: index 3 when Monday is 0.
      const int dow = static_cast<int>(floor_mod(floor_div(local, 86400) + 3, 7));
      if (scheme == TimeScheme::kDayOfWeek) return dow;
      return dow >= 5 ? 1 : 0;
    }
  }
  return 0;
}

RegionModel fit_regions(std::span<const Coord> coords, int k, std::uint64_t seed) {
  if (k < 1) throw ConfigError("number of regions must be at least 1");
  std::vector<Coord> distinct(coords.begin(), coords.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (static_cast<int>(distinct.size()) < k) {
    throw DataError("k-means needs at least " + std::to_string(k) + " distinct coordinates, got " +
                    std::to_string(distinct.size()));
  }

  // k-means++ seeding over distinct points; already-chosen points have zero
  // weight, so no point is picked twice.
  Rng rng(seed);
  std::vector<Coord> centroids;
  centroids.reserve(k);
  centroids.push_back(distinct[rng.below(distinct.size())]);
  std::vector<double> d2(distinct.size());
  for (std::size_t i = 0; i < distinct.size(); ++i) d2[i] = sq_distance(distinct[i], centroids[0]);
  while (static_cast<int>(centroids.size()) < k) {
    double total = 0.0;
    for (double w : d2) total += w;
    double target = rng.uniform() * total;
    std::size_t pick = distinct.size();
    for (std::size_t i = 0; i < distinct.size(); ++i) {
      if (d2[i] <= 0.0) continue;
      pick = i;
      if (target < d2[i]) break;
      target -= d2[i];
    }
    centroids.push_back(distinct[pick]);
    for (std::size_t i = 0; i < distinct.size(); ++i) {
      d2[i] = std::min(d2[i], sq_distance(distinct[i], distinct[pick]));
    }
  }

  std::vector<int> assignment = assign_all(coords, centroids);
  auto repair_empty = [&]() {
    // Moves an empty cluster onto the point farthest from its centroid.
    for (int guard = 0; guard < 4 * k; ++guard) {
      std::vector<std::size_t> sizes(k, 0);
      for (int a : assignment) ++sizes[a];
      const auto empty = std::find(sizes.begin(), sizes.end(), 0u);
      if (empty == sizes.end()) return;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < coords.size(); ++i) {
        const double d = sq_distance(coords[i], centroids[assignment[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      centroids[empty - sizes.begin()] = coords[far];
      assignment = assign_all(coords, centroids);
    }
  };

  for (int iter = 0; iter < 100; ++iter) {
    std::vector<double> sum_lat(k, 0.0), sum_lon(k, 0.0);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < coords.size(); ++i) {
      sum_lat[assignment[i]] += coords[i].lat;
      sum_lon[assignment[i]] += coords[i].lon;
      ++count[assignment[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (count[c] > 0) {
        centroids[c] = {sum_lat[c] / static_cast<double>(count[c]),
                        sum_lon[c] / static_cast<double>(count[c])};
      }
    }
    auto next = assign_all(coords, centroids);
    const bool stable = next == assignment;
    assignment = std::move(next);
    repair_empty();
    if (stable) break;
  }

  RegionModel model;
  model.centroids = std::move(centroids);
  model.populated.assign(k, true);
  return model;
}

int assign_region(const Coord& coord, const RegionModel& model) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int c = 0; c < model.size(); ++c) {
    if (!model.populated.empty() && !model.populated[c]) continue;
    const double d = sq_distance(coord, model.centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (best < 0) throw DataError("region model has no populated regions");
  return best;
}

RegionModel load_region_file(const std::filesystem::path& path,
                             std::span<const std::pair<std::string, Coord>> training_points) {
  std::ifstream in(path);
  if (!in) throw MissingInputError(path.string());
  RegionModel model;
  int max_id = -1;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected key<TAB>region");
    }
    const std::string key = line.substr(0, tab);
    const std::string id_text = line.substr(tab + 1);
    int id = -1;
    const auto r = std::from_chars(id_text.data(), id_text.data() + id_text.size(), id);
    if (r.ec != std::errc{} || id < 0) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": bad region id");
    }
    max_id = std::max(max_id, id);
    if (const auto c = parse_coord_key(key)) {
      model.coord_regions[*c] = id;
    } else {
      model.poi_regions[key] = id;
    }
  }
  if (max_id < 0) throw DataError("region file is empty: " + path.string());

  std::vector<double> sum_lat(max_id + 1, 0.0), sum_lon(max_id + 1, 0.0);
  std::vector<std::size_t> count(max_id + 1, 0);
  for (const auto& [poi, coord] : training_points) {
    int id = -1;
    if (auto it = model.poi_regions.find(poi); it != model.poi_regions.end()) {
      id = it->second;
    } else if (auto jt = model.coord_regions.find(coord); jt != model.coord_regions.end()) {
      id = jt->second;
    }
    if (id < 0) continue;
    sum_lat[id] += coord.lat;
    sum_lon[id] += coord.lon;
    ++count[id];
  }
  model.centroids.resize(max_id + 1);
  model.populated.resize(max_id + 1);
  for (int c = 0; c <= max_id; ++c) {
    model.populated[c] = count[c] > 0;
    if (count[c] > 0) {
      model.centroids[c] = {sum_lat[c] / static_cast<double>(count[c]),
                            sum_lon[c] / static_cast<double>(count[c])};
    }
  }
  if (std::none_of(model.populated.begin(), model.populated.end(), [](bool b) { return b; })) {
    throw DataError("no training coordinate matched the region file " + path.string());
  }
  return model;
}

Discretizer::Discretizer(TimeScheme time_scheme, std::int64_t utc_offset_seconds,
                         RegionModel regions)
    : time_scheme_(time_scheme),
      utc_offset_seconds_(utc_offset_seconds),
      regions_(std::move(regions)) {}

Discretizer Discretizer::fit(const DiscretizerSpec& spec,
                             std::span<const std::pair<std::string, Coord>> training_points) {
  RegionModel regions;
  if (spec.space_scheme == SpaceScheme::kKMeans) {
    std::vector<Coord> coords;
    coords.reserve(training_points.size());
    for (const auto& p : training_points) coords.push_back(p.second);
    regions = fit_regions(coords, spec.num_regions, spec.seed);
  } else {
    regions = load_region_file(spec.region_file, training_points);
  }
  return Discretizer(spec.time_scheme, spec.utc_offset_seconds, std::move(regions));
}

int Discretizer::region(std::string_view poi, const Coord& coord) const {
  if (!regions_.poi_regions.empty()) {
    if (auto it = regions_.poi_regions.find(std::string(poi)); it != regions_.poi_regions.end()) {
      return it->second;
    }
  }
  return region(coord);
}

int Discretizer::region(const Coord& coord) const {
  if (auto it = regions_.coord_regions.find(coord); it != regions_.coord_regions.end()) {
    return it->second;
  }
  return assign_region(coord, regions_);
}

void Discretizer::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "time_scheme\t" << to_string(time_scheme_) << '\n';
  out << "utc_offset_seconds\t" << utc_offset_seconds_ << '\n';
  char buf[64];
  for (int c = 0; c < regions_.size(); ++c) {
    const bool populated = regions_.populated.empty() || regions_.populated[c];
    out << "region\t" << c << '\t' << (populated ? 1 : 0);
    for (double v : {regions_.centroids[c].lat, regions_.centroids[c].lon}) {
      const auto r = std::to_chars(buf, buf + sizeof buf, v);
      out << '\t' << std::string_view(buf, r.ptr - buf);
    }
    out << '\n';
  }
  if (!out) throw Error("failed writing " + path.string());
}

Discretizer Discretizer::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError(path.string());
  TimeScheme scheme = TimeScheme::kHourly;
  std::int64_t offset = 0;
  RegionModel regions;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string kind;
    std::getline(fields, kind, '\t');
    if (kind == "time_scheme") {
      std::string name;
      std::getline(fields, name);
      scheme = parse_time_scheme(name);
    } else if (kind == "utc_offset_seconds") {
      fields >> offset;
    } else if (kind == "region") {
      std::string id, pop, lat, lon;
      std::getline(fields, id, '\t');
      std::getline(fields, pop, '\t');
      std::getline(fields, lat, '\t');
      std::getline(fields, lon);
      Coord c;
      std::from_chars(lat.data(), lat.data() + lat.size(), c.lat);
      std::from_chars(lon.data(), lon.data() + lon.size(), c.lon);
      regions.centroids.push_back(c);
      regions.populated.push_back(pop == "1");
    }
  }
  if (regions.centroids.empty()) throw DataError("discretizer file has no regions: " + path.string());
  return Discretizer(scheme, offset, std::move(regions));
}

}  // namespace sta
