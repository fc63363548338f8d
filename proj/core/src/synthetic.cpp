#include "sta/synthetic.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <ostream>
#include <string>

#include <Eigen/Dense>

#include "sta/rng.hpp"

namespace sta {
namespace {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::RowVectorXd;

Mat gaussian(Eigen::Index rows, int cols, Rng& rng) {
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

Vec noisy(const Vec& v, double sigma, Rng& rng) {
  Vec out = v;
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] += sigma * rng.normal();
  return out;
}

template <typename Candidates>
Id nearest(const Mat& pois, const Vec& target, const Candidates& candidates) {
  Id best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (Id v : candidates) {
    const double d = (pois.row(v) - target).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = v;
    }
  }
  return best;
}

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

PlantedData make_planted(const PlantedSpec& spec) {
  Rng rng(derive_seed(spec.seed, "planted.truth"));
  const Mat users = gaussian(spec.users, spec.dim, rng);
  const Mat pois = gaussian(spec.pois, spec.dim, rng);
  const Mat rels = gaussian(spec.relations, spec.dim, rng);
  std::vector<Id> all(static_cast<std::size_t>(spec.pois));
  for (Id v = 0; v < spec.pois; ++v) all[static_cast<std::size_t>(v)] = v;

  auto draw = [&](Rng& r) {
    const auto u = static_cast<Id>(r.below(static_cast<std::uint64_t>(spec.users)));
    const auto t = static_cast<Id>(r.below(static_cast<std::uint64_t>(spec.relations)));
    const Id v = nearest(pois, noisy(users.row(u) + rels.row(t), spec.noise, r), all);
    return Triple{u, t, v};
  };

  Rng train_rng(derive_seed(spec.seed, "planted.train"));
  std::vector<Triple> train;
  train.reserve(spec.train_size);
  for (std::size_t i = 0; i < spec.train_size; ++i) train.push_back(draw(train_rng));

  Rng test_rng(derive_seed(spec.seed, "planted.test"));
  PlantedData out;
  for (std::size_t i = 0; i < spec.test_size; ++i) {
    const Triple t = draw(test_rng);
    out.test.push_back({t.head, t.relation, t.tail});
  }
  out.train = TripleStore(std::move(train), spec.users, spec.relations, spec.pois);
  return out;
}

std::vector<CheckIn> make_planted_checkins(const PlantedCheckinSpec& spec) {
  Rng rng(derive_seed(spec.seed, "planted.checkins"));
  const int n_hours = static_cast<int>(spec.hours.size());
  const int per_group = spec.warm_per_group + spec.cold_per_group;
  const int n_groups = spec.regions * spec.groups_per_region;
  const int n_pois = n_groups * per_group;

  const Mat users = gaussian(spec.users, spec.dim, rng);
  const Mat patterns = gaussian(static_cast<Eigen::Index>(spec.regions) * n_hours, spec.dim, rng);
  const Mat centres = gaussian(n_groups, spec.dim, rng);

  // POI ids: group-major, warm members first.
  Mat pois(n_pois, spec.dim);
  std::vector<int> region(static_cast<std::size_t>(n_pois));
  std::vector<bool> cold(static_cast<std::size_t>(n_pois));
  std::vector<Coord> where(static_cast<std::size_t>(n_pois));
  std::vector<std::vector<std::string>> words(static_cast<std::size_t>(n_pois));
  std::vector<std::vector<Id>> warm_in_region(static_cast<std::size_t>(spec.regions));
  std::vector<std::vector<Id>> all_in_region(static_cast<std::size_t>(spec.regions));
  for (int g = 0; g < n_groups; ++g) {
    const int r = g % spec.regions;
    for (int j = 0; j < per_group; ++j) {
      const Id v = g * per_group + j;
      pois.row(v) = centres.row(g) + spec.group_spread * gaussian(1, spec.dim, rng);
      region[v] = r;
      cold[v] = j >= spec.warm_per_group;
      where[v] = {10.0 + 0.05 * rng.uniform(-1.0, 1.0), 10.0 * r - 40.0 + 0.05 * rng.uniform(-1.0, 1.0)};
      if (!cold[v]) warm_in_region[r].push_back(v);
      all_in_region[r].push_back(v);
      if (spec.words) {
        for (int w = 0; w < spec.words_per_group; ++w) {
          if (rng.bernoulli(spec.word_keep)) {
            words[v].push_back("g" + std::to_string(g) + "w" + std::to_string(w));
          }
        }
        if (words[v].empty()) {
          const auto w = rng.below(static_cast<std::uint64_t>(spec.words_per_group));
          words[v].push_back("g" + std::to_string(g) + "w" + std::to_string(w));
        }
      }
    }
  }

  const std::int64_t base = 1'500'000'000 - 1'500'000'000 % 86400;  // midnight UTC
  auto stamp = [&](int hour) {
    const auto day = static_cast<std::int64_t>(rng.below(60));
    return base + day * 86400 + hour * 3600 + static_cast<std::int64_t>(rng.below(3600));
  };
  auto emit = [&](std::vector<CheckIn>& out, int u, Id v, int hour) {
    out.push_back({"u" + std::to_string(u), "p" + std::to_string(v), stamp(hour), where[v].lat,
                   where[v].lon, words[v]});
  };

  std::vector<CheckIn> out;
  for (int u = 0; u < spec.users; ++u) {
    for (int i = 0; i < spec.checkins_per_user; ++i) {
      const int r = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.regions)));
      const int h = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_hours)));
      const Vec target = noisy(users.row(u) + patterns.row(r * n_hours + h), spec.noise, rng);
      emit(out, u, nearest(pois, target, warm_in_region[r]), spec.hours[h]);
    }
  }

  // Each cold POI is visited by the users for whom it is nearest (over all
  // POIs of its region) at some hour, best fits first.
  for (Id v = 0; v < n_pois; ++v) {
    if (!cold[v]) continue;
    const int r = region[v];
    struct Fit {
      double gap;
      int user;
      int hour;
    };
    std::vector<Fit> fits;
    for (int u = 0; u < spec.users; ++u) {
      for (int h = 0; h < n_hours; ++h) {
        const Vec target = users.row(u) + patterns.row(r * n_hours + h);
        const double own = (pois.row(v) - target).squaredNorm();
        double best_other = std::numeric_limits<double>::infinity();
        for (Id w : all_in_region[r]) {
          if (w != v) best_other = std::min(best_other, (pois.row(w) - target).squaredNorm());
        }
        fits.push_back({own - best_other, u, h});
      }
    }
    std::sort(fits.begin(), fits.end(), [](const Fit& a, const Fit& b) {
      return a.gap < b.gap || (a.gap == b.gap && a.user < b.user);
    });
    const int want =
        1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::max(1, spec.cold_visitors_max))));
    std::vector<int> seen;
    for (const Fit& f : fits) {
      if (static_cast<int>(seen.size()) == want) break;
      if (std::find(seen.begin(), seen.end(), f.user) != seen.end()) continue;
      seen.push_back(f.user);
      emit(out, f.user, v, spec.hours[f.hour]);
    }
  }
  return out;
}

void write_checkins_csv(std::ostream& out, std::span<const CheckIn> checkins) {
  for (const auto& c : checkins) {
    out << c.user << ',' << c.poi << ',' << fmt(c.lat) << ',' << fmt(c.lon) << ',' << c.timestamp
        << ',';
    for (std::size_t i = 0; i < c.words.size(); ++i) out << (i ? "|" : "") << c.words[i];
    out << '\n';
  }
}

}  // namespace sta
