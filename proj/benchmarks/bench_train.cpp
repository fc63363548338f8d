#include <benchmark/benchmark.h>

#include "sta/score.hpp"
#include "sta/synthetic.hpp"
#include "sta/trainer.hpp"

namespace {

const sta::TripleStore& planted() {
  static const sta::TripleStore store = [] {
    sta::PlantedSpec spec;
    spec.train_size = 5000;
    return sta::make_planted(spec).train;
  }();
  return store;
}

void BM_TrainEpoch(benchmark::State& state) {
  const auto variant = static_cast<sta::Variant>(state.range(0));
  sta::TrainConfig c;
  c.variant = variant;
  c.dim = c.rel_dim = static_cast<int>(state.range(1));
  c.batch_size = 100;
  c.learning_rate = 0.001;
  c.margin = 1.0;
  const auto& store = planted();
  auto params = sta::init_params(
      {store.num_heads(), store.num_tails(), store.num_relations(), 0, c.dim, c.rel_dim, variant}, 1);
  sta::Rng rng(7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sta::train_epoch(params, store, c, rng));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(store.size()));
}
BENCHMARK(BM_TrainEpoch)
    ->Args({0, 32})
    ->Args({1, 32})
    ->Args({2, 32})
    ->Args({2, 100})
    ->Unit(benchmark::kMillisecond);

void BM_GradPair(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto p = sta::init_params({10, 10, 2, 0, d, d, sta::Variant::kTransR}, 3);
  const sta::Triple pos{1, 0, 2}, neg{1, 0, 3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(sta::grad_pair(p, pos, neg, 100.0));
  }
}
BENCHMARK(BM_GradPair)->Arg(32)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
