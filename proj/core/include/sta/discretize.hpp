#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace sta {

enum class TimeScheme { kHourly, kDayOfWeek, kWeekdayWeekend };

/// 24, 7 or 2.
int num_slots(TimeScheme scheme);
std::string_view to_string(TimeScheme scheme);
/// Accepts "hourly"/"24", "day-of-week"/"dow"/"7", "weekday-weekend"/"weekend"/"2".
TimeScheme parse_time_scheme(std::string_view name);

/// Maps a timestamp to its slot. Day-of-week slots are Monday-indexed;
/// weekday-weekend yields 1 for Saturday and Sunday.
int discretize_time(std::int64_t timestamp, TimeScheme scheme, std::int64_t utc_offset_seconds = 0);

struct Coord {
  double lat = 0.0;
  double lon = 0.0;
  auto operator<=>(const Coord&) const = default;
};

/// Squared Euclidean distance in (lat, lon) degree space.
inline double sq_distance(const Coord& a, const Coord& b) {
  const double dl = a.lat - b.lat;
  const double dn = a.lon - b.lon;
  return dl * dl + dn * dn;
}

/// Regions of the plane, each represented by a centroid. When built from a
/// region file, explicit POI or coordinate assignments take precedence over
/// the nearest-centroid rule.
struct RegionModel {
  std::vector<Coord> centroids;
  /// False for region ids that appear in a region file but received no
  /// training coordinates; such regions are never chosen by nearest search.
  std::vector<bool> populated;
  std::unordered_map<std::string, int> poi_regions;
  std::map<Coord, int> coord_regions;

  int size() const { return static_cast<int>(centroids.size()); }
};

/// Lloyd's k-means on (lat, lon) with seeded k-means++ initialisation over
/// the distinct coordinates. Stops when assignments are stable or after 100
/// iterations. Every one of the k regions is non-empty on return. Throws
/// DataError if there are fewer than k distinct coordinates.
RegionModel fit_regions(std::span<const Coord> coords, int k, std::uint64_t seed);

/// Nearest populated centroid; ties go to the lowest id.
int assign_region(const Coord& coord, const RegionModel& model);

/// Loads a two-column TSV (poi key or "lat,lon" → region id). Centroids are
/// the means of the training coordinates that fall in each region.
RegionModel load_region_file(const std::filesystem::path& path,
                             std::span<const std::pair<std::string, Coord>> training_points);

enum class SpaceScheme { kKMeans, kRegionFile };

/// Settings for the time/space discretisation, before fitting.
struct DiscretizerSpec {
  TimeScheme time_scheme = TimeScheme::kHourly;
  std::int64_t utc_offset_seconds = 0;
  SpaceScheme space_scheme = SpaceScheme::kKMeans;
  int num_regions = 200;
  std::uint64_t seed = 0;
  std::filesystem::path region_file;
};

/// Fitted time/space discretiser: turns a check-in into a (slot, region)
/// spatiotemporal pattern.
class Discretizer {
 public:
  Discretizer() = default;
  Discretizer(TimeScheme time_scheme, std::int64_t utc_offset_seconds, RegionModel regions);

  /// Fits the spatial model on training points (poi key, coordinate).
  static Discretizer fit(const DiscretizerSpec& spec,
                         std::span<const std::pair<std::string, Coord>> training_points);

  int slot(std::int64_t timestamp) const {
    return discretize_time(timestamp, time_scheme_, utc_offset_seconds_);
  }
  /// Region of a POI at `coord`; explicit region-file entries win.
  int region(std::string_view poi, const Coord& coord) const;
  /// Region of a bare coordinate (queries).
  int region(const Coord& coord) const;

  TimeScheme time_scheme() const { return time_scheme_; }
  std::int64_t utc_offset_seconds() const { return utc_offset_seconds_; }
  const RegionModel& regions() const { return regions_; }

  /// Text form: scheme, offset and the centroid table. Explicit region-file
  /// assignments are not persisted; queries resolve by nearest centroid.
  void save(const std::filesystem::path& path) const;
  static Discretizer load(const std::filesystem::path& path);

 private:
  TimeScheme time_scheme_ = TimeScheme::kHourly;
  std::int64_t utc_offset_seconds_ = 0;
  RegionModel regions_;
};

}  // namespace sta
