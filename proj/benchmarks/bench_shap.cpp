#include <benchmark/benchmark.h>

#include "shapdag/gbt.hpp"
#include "shapdag/shap.hpp"
#include "shapdag/synth.hpp"

using namespace shapdag;

namespace {

struct TreeShapFixture {
    GbtModel model;
    Matrix rows;
    Matrix background;
};

TreeShapFixture make_fixture(int p, int trees, std::size_t explained, std::size_t bg) {
    Rng rng = make_rng(1);
    const Dag g = sample_dag(p, 5, rng);
    const Dataset d = generate_sem(g, MechanismFamily::Linear, 500, rng);
    TreeShapFixture f;
    f.model = train_gbt(d, d.columns[0],
                        {.trees = trees, .max_depth = 4, .learning_rate = 0.05,
                         .min_samples_leaf = 1},
                        rng);
    auto [x, names] = feature_matrix(d, d.columns[0]);
    (void)names;
    f.rows.assign(x.begin(), x.begin() + explained);
    f.background.assign(x.begin(), x.begin() + bg);
    return f;
}

}  // namespace

static void BM_TreeShap(benchmark::State& state) {
    const TreeShapFixture f =
        make_fixture(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)),
                     32, 32);
    for (auto _ : state) {
        benchmark::DoNotOptimize(shap_tree(f.model, f.rows, f.background));
    }
    state.SetItemsProcessed(state.iterations() * f.rows.size() * f.background.size());
}
BENCHMARK(BM_TreeShap)->Args({5, 50})->Args({10, 100})->Args({10, 200});

static void BM_BruteForceShap(benchmark::State& state) {
    const TreeShapFixture f = make_fixture(static_cast<int>(state.range(0)), 50, 4, 16);
    const PredictFn fn = [&](const std::vector<double>& x) { return f.model.predict_row(x); };
    for (auto _ : state) {
        for (const auto& row : f.rows) {
            benchmark::DoNotOptimize(shap_bruteforce(fn, row, f.background));
        }
    }
}
BENCHMARK(BM_BruteForceShap)->Arg(5)->Arg(8);
