#include <benchmark/benchmark.h>

#include "aemod/scenarios.hpp"
#include "aemod/sim.hpp"

namespace {

aemod::sim::SimConfig bench_sim(aemod::sim::Mode mode) {
    aemod::sim::SimConfig config;
    config.zone.lambda_v = 8.0;
    config.zone.mu_c = 0.033;
    config.zone.c_points = 40;
    config.zone.n_classes = 7;
    config.zone.p = aemod::scenarios::make_distribution({aemod::scenarios::ShapeKind::uniform}, 7, 1.0);
    config.zone.lambda_c =
        aemod::scenarios::make_distribution({aemod::scenarios::ShapeKind::uniform}, 7, 7.0);
    config.policy = aemod::scenarios::make_policy(aemod::scenarios::PolicyKind::equal_split, 7);
    config.mode = mode;
    config.horizon = 20000.0;
    config.warmup = 2000.0;
    config.seed = 7;
    return config;
}

void AbstractSim(benchmark::State& state) {
    const auto config = bench_sim(aemod::sim::Mode::abstract);
    for (auto _ : state) {
        auto report = aemod::sim::run(config);
        benchmark::DoNotOptimize(report.per_class.front().mean_rt);
    }
}
BENCHMARK(AbstractSim);

void PhysicalSim(benchmark::State& state) {
    const auto config = bench_sim(aemod::sim::Mode::physical);
    for (auto _ : state) {
        auto report = aemod::sim::run(config);
        benchmark::DoNotOptimize(report.vehicles_dispatched);
    }
}
BENCHMARK(PhysicalSim);

}  // namespace
