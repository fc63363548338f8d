#include <benchmark/benchmark.h>

#include "sta/params.hpp"
#include "sta/recommend.hpp"

namespace {

sta::ModelParams model(sta::Id pois, int dim) {
  return sta::init_params({64, pois, 16, 0, dim, dim, sta::Variant::kTransR}, 1);
}

void BM_RankPois(benchmark::State& state) {
  const auto p = model(static_cast<sta::Id>(state.range(0)), static_cast<int>(state.range(1)));
  const auto v_q = sta::translate_query(p, 3, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sta::rank_pois(p, v_q, 5, 10));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RankPois)->Args({1000, 100})->Args({10000, 100})->Args({10000, 50});

void BM_RankPoisBlocked(benchmark::State& state) {
  const auto p = model(10000, 100);
  const auto v_q = sta::translate_query(p, 3, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sta::rank_pois_blocked(p, v_q, 5, 10, 2048, static_cast<unsigned>(state.range(0))));
  }
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_RankPoisBlocked)->Arg(1)->Arg(2)->Arg(4);

void BM_PoiDistances(benchmark::State& state) {
  const auto p = model(10000, 100);
  const auto projected = sta::project_pois(p, 5);
  const auto v_q = sta::translate_query(p, 3, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sta::poi_distances(projected, v_q));
  }
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_PoiDistances);

}  // namespace

BENCHMARK_MAIN();
