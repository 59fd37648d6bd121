#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fruitscan/edgeops.hpp"
#include "fruitscan/metrics.hpp"
#include "fruitscan/phenotype.hpp"

using namespace fruitscan;

namespace {

geometry::Polygon ngon(int n, double r, double cx, double cy) {
    std::vector<geometry::Point> v;
    for (int k = 0; k < n; ++k) {
        const double a = 2.0 * std::numbers::pi * k / n;
        v.push_back({cx + r * std::cos(a), cy + 1.3 * r * std::sin(a)});
    }
    return geometry::Polygon(std::move(v));
}

void BM_Measure(benchmark::State& state) {
    const auto poly = ngon(static_cast<int>(state.range(0)), 150.0, 200.0, 250.0);
    for (auto _ : state) benchmark::DoNotOptimize(phenotype::measure(poly));
}
BENCHMARK(BM_Measure)->Arg(64)->Arg(256)->Arg(1024);

void BM_Rasterize(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const auto poly = ngon(256, side * 0.35, side * 0.5, side * 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(geometry::rasterize(poly, side, side));
}
BENCHMARK(BM_Rasterize)->Arg(128)->Arg(512)->Arg(1024);

void BM_MeanEdgeError(benchmark::State& state) {
    std::vector<metrics::MaskPair> pairs;
    for (int i = 0; i < 31; ++i) {
        pairs.push_back({ngon(180, 40.0 + i, 100.0, 100.0), ngon(120, 42.0 + i, 101.0, 99.0)});
    }
    const int samples = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(metrics::mean_edge_error(pairs, samples));
}
BENCHMARK(BM_MeanEdgeError)->Arg(100)->Arg(1000);

RasterGrid random_grid(int side) {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(side * side));
    for (auto& x : v) x = u(rng);
    return RasterGrid(side, side, std::move(v));
}

void BM_Sobel(benchmark::State& state) {
    const auto grid = random_grid(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(edgeops::sobel(grid));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(grid.size()));
}
BENCHMARK(BM_Sobel)->Arg(64)->Arg(640);

void BM_EdgeBoost(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    ImageBuffer img(side, side, 3);
    std::mt19937 rng(2);
    std::uniform_int_distribution<int> px(0, 255);
    for (auto& v : img.data()) v = static_cast<std::uint8_t>(px(rng));
    for (auto _ : state) benchmark::DoNotOptimize(edgeops::edge_boost(img));
    state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(img.data().size()));
}
BENCHMARK(BM_EdgeBoost)->Arg(256)->Arg(640);

}  // namespace

BENCHMARK_MAIN();
