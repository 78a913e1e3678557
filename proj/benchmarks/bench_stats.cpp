#include "akmine/stats.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

void BM_ChiSquare2x2(benchmark::State& state) {
    akmine::ContingencyTable2x2 t{30, 10, 10, 30};
    for (auto _ : state) {
        benchmark::DoNotOptimize(akmine::chi_square_2x2(t));
    }
}
BENCHMARK(BM_ChiSquare2x2);

void BM_KruskalWallis(benchmark::State& state) {
    std::mt19937_64 rng(7);
    std::vector<std::vector<double>> groups(5);
    for (auto& g : groups) {
        for (int i = 0; i < state.range(0); ++i) {
            g.push_back(static_cast<double>(rng() % 5 + 1));
        }
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(akmine::kruskal_wallis(groups));
    }
}
BENCHMARK(BM_KruskalWallis)->Arg(50)->Arg(500);

}  // namespace

BENCHMARK_MAIN();
