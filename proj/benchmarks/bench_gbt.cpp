#include <benchmark/benchmark.h>

#include "shapdag/gbt.hpp"
#include "shapdag/synth.hpp"

using namespace shapdag;

static void BM_TrainGbt(benchmark::State& state) {
    Rng rng = make_rng(2);
    const Dag g = sample_dag(static_cast<int>(state.range(0)), 5, rng);
    const Dataset d =
        generate_sem(g, MechanismFamily::Linear, static_cast<std::size_t>(state.range(1)), rng);
    for (auto _ : state) {
        Rng train_rng = make_rng(3);
        benchmark::DoNotOptimize(train_gbt(d, d.columns[0],
                                           {.trees = 200, .max_depth = 4,
                                            .learning_rate = 0.05, .min_samples_leaf = 1},
                                           train_rng));
    }
}
BENCHMARK(BM_TrainGbt)->Args({10, 500})->Args({10, 2000})->Args({25, 500});
