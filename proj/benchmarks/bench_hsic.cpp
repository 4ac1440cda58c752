#include <benchmark/benchmark.h>

#include "shapdag/anm.hpp"

using namespace shapdag;

namespace {

std::vector<double> gaussians(std::size_t n, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = gauss(rng);
    return v;
}

}  // namespace

static void BM_HsicPermutation(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const auto a = gaussians(n, 1);
    const auto b = gaussians(n, 2);
    HsicConfig cfg;
    cfg.permutations = static_cast<int>(state.range(1));
    for (auto _ : state) {
        Rng rng = make_rng(3);
        benchmark::DoNotOptimize(hsic_test(a, b, cfg, rng));
    }
}
BENCHMARK(BM_HsicPermutation)->Args({200, 100})->Args({500, 100})->Args({500, 200});

static void BM_HsicGamma(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const auto a = gaussians(n, 4);
    const auto b = gaussians(n, 5);
    HsicConfig cfg;
    cfg.use_gamma_approx = true;
    for (auto _ : state) {
        Rng rng = make_rng(6);
        benchmark::DoNotOptimize(hsic_test(a, b, cfg, rng));
    }
}
BENCHMARK(BM_HsicGamma)->Arg(200)->Arg(500);

static void BM_SplineFit(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const auto x = gaussians(n, 7);
    auto y = gaussians(n, 8);
    for (std::size_t i = 0; i < n; ++i) y[i] += x[i] * x[i];
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_univariate(x, y));
    }
}
BENCHMARK(BM_SplineFit)->Arg(200)->Arg(500);
