#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "sta/checkin.hpp"
#include "sta/evaluate.hpp"
#include "sta/vocab.hpp"

namespace sta {

/// Ground-truth translation model: every coordinate of every true user, POI
/// and relation vector is standard normal. A check-in (u, r) goes to the POI
/// nearest to u + r + noise, noise ~ N(0, noise^2) per coordinate.
struct PlantedSpec {
  Id users = 50;
  Id pois = 200;
  Id relations = 20;
  int dim = 16;
  double noise = 0.05;
  std::size_t train_size = 4000;
  std::size_t test_size = 500;
  std::uint64_t seed = 1;
};

struct PlantedData {
  TripleStore train;
  std::vector<LabeledQuery> test;
};

PlantedData make_planted(const PlantedSpec& spec);

/// Raw check-ins drawn from a planted model over a map of well-separated
/// regions. POIs come in groups: members of a group sit close to the
/// group's centre in the true embedding space and share the group's
/// content words. A visit picks an (hour, region) pattern and goes to the
/// warm POI of that region nearest to u + tl + noise. Cold POIs get visits
/// only from the `cold_visitors_max` or fewer users whose queries they fit
/// best, so they stay below any cold-start threshold above that count.
struct PlantedCheckinSpec {
  int users = 60;
  int regions = 4;
  int groups_per_region = 5;
  int warm_per_group = 4;
  int cold_per_group = 0;
  int words_per_group = 3;
  double word_keep = 0.7;      // chance a POI carries each group word
  double group_spread = 0.3;   // std-dev of members around the group centre
  std::vector<int> hours = {8, 12, 18, 22};
  int checkins_per_user = 40;
  int dim = 16;
  double noise = 0.05;
  int cold_visitors_max = 3;
  bool words = true;
  std::uint64_t seed = 1;
};

std::vector<CheckIn> make_planted_checkins(const PlantedCheckinSpec& spec);

/// Writes "user,poi,lat,lon,timestamp,words" lines.
void write_checkins_csv(std::ostream& out, std::span<const CheckIn> checkins);

}  // namespace sta
