#include <benchmark/benchmark.h>

#include "aemod/lp.hpp"
#include "aemod/scenarios.hpp"
#include "aemod/stability.hpp"

namespace {

aemod::ZoneConfig bench_zone(int n) {
    aemod::ZoneConfig zone;
    zone.lambda_v = 15.0;
    zone.c_points = 40;
    zone.n_classes = n;
    // mu_c chosen so the class count clears the capacity bound with room.
    zone.mu_c = 1.2 * zone.lambda_v / (zone.c_points * n);
    zone.p = aemod::scenarios::make_distribution({aemod::scenarios::ShapeKind::gaussian}, n, 1.0);
    zone.lambda_c =
        aemod::scenarios::make_distribution({aemod::scenarios::ShapeKind::gaussian}, n, 0.85 * zone.lambda_v);
    return zone;
}

void SolveZoneProgram(benchmark::State& state) {
    const auto zone = bench_zone(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto solution = aemod::lp::optimize_policy(zone);
        benchmark::DoNotOptimize(solution.r_star);
    }
}
BENCHMARK(SolveZoneProgram)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void GridOracle(benchmark::State& state) {
    const auto zone = bench_zone(3);
    for (auto _ : state) {
        auto result = aemod::lp::grid_search(zone, 0.05);
        benchmark::DoNotOptimize(result.best_rate);
    }
}
BENCHMARK(GridOracle);

}  // namespace
