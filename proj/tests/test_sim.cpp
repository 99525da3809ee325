#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "aemod/lp.hpp"
#include "aemod/sim.hpp"

using namespace aemod;

namespace {

ZoneConfig symmetric_toy() {
    ZoneConfig zone;
    zone.lambda_v = 2.0;
    zone.mu_c = 1.0;
    zone.c_points = 1;
    zone.n_classes = 2;
    zone.p = {0.5, 0.5};
    zone.lambda_c = {0.4, 0.4};
    return zone;
}

sim::SimConfig make_sim(ZoneConfig zone, Policy policy, sim::Mode mode, double horizon,
                        uint64_t seed) {
    sim::SimConfig config;
    config.zone = std::move(zone);
    config.policy = std::move(policy);
    config.mode = mode;
    config.horizon = horizon;
    config.warmup = horizon * 0.1;
    config.seed = seed;
    return config;
}

ZoneConfig reference_zone(int n, double total_demand) {
    ZoneConfig zone;
    zone.lambda_v = 15.0;
    zone.mu_c = 0.033;
    zone.c_points = 40;
    zone.n_classes = n;
    zone.p.assign(static_cast<size_t>(n), 1.0 / n);
    zone.lambda_c.assign(static_cast<size_t>(n), total_demand / n);
    return zone;
}

}  // namespace

TEST_CASE("abstract station with unit margin reproduces the closed form") {
    // Class rates 2.0 against demand 1.0: expected sojourn is 1 minute.
    ZoneConfig zone;
    zone.lambda_v = 4.0;
    zone.mu_c = 5.0;
    zone.c_points = 10;
    zone.n_classes = 2;
    zone.p = {0.5, 0.5};
    zone.lambda_c = {1.0, 1.0};
    const Policy policy{{0.5, 0.5}};

    const auto report = sim::run(make_sim(zone, policy, sim::Mode::abstract, 1e6, 42));
    REQUIRE(report.per_class.size() == 2);
    for (const auto& c : report.per_class) {
        CHECK(c.mean_rt == doctest::Approx(1.0).epsilon(0.02));
        CHECK(c.served > 800000);
        CHECK_FALSE(c.diverging);
        CHECK(c.ci_halfwidth < 0.05);
        CHECK(c.p95_rt > c.mean_rt);
    }

    const auto rows = sim::validate_against_formula(report, zone, policy, 0.05);
    for (const auto& row : rows) {
        CHECK(row.pass);
        CHECK(row.analytic == doctest::Approx(1.0));
    }
}

TEST_CASE("abstract toy at the optimal policy matches the solved margin") {
    const auto zone = symmetric_toy();
    const auto solution = lp::optimize_policy(zone);
    REQUIRE(solution.status == SolveStatus::optimal);

    const auto report = sim::run(make_sim(zone, solution.policy, sim::Mode::abstract, 1e6, 7));
    for (const auto& c : report.per_class)
        CHECK(c.mean_rt == doctest::Approx(1.0 / 0.6).epsilon(0.03));
}

TEST_CASE("Little's law holds per station in abstract mode") {
    const auto zone = symmetric_toy();
    const Policy policy{{0.5, 0.5}};
    const auto report = sim::run(make_sim(zone, policy, sim::Mode::abstract, 1e6, 11));
    for (const auto& c : report.per_class) {
        const double expected = zone.customer_rate(c.cls) * c.mean_rt;
        CHECK(c.mean_in_system == doctest::Approx(expected).epsilon(0.03));
    }
}

TEST_CASE("identical configs give bit-identical reports, seeds matter") {
    const auto zone = symmetric_toy();
    const auto config = make_sim(zone, Policy{{0.5, 0.5}}, sim::Mode::physical, 50000, 123);
    const auto a = sim::run(config);
    const auto b = sim::run(config);
    REQUIRE(a.per_class.size() == b.per_class.size());
    for (size_t i = 0; i < a.per_class.size(); ++i) {
        CHECK(a.per_class[i].served == b.per_class[i].served);
        CHECK(a.per_class[i].mean_rt == b.per_class[i].mean_rt);  // bitwise
        CHECK(a.per_class[i].max_queue == b.per_class[i].max_queue);
    }
    CHECK(a.vehicles_arrived == b.vehicles_arrived);

    auto other = config;
    other.seed = 124;
    const auto c = sim::run(other);
    CHECK(a.vehicles_arrived != c.vehicles_arrived);
}

TEST_CASE("physical mode conserves vehicles exactly") {
    const auto zone = symmetric_toy();
    const auto report = sim::run(make_sim(zone, Policy{{0.3, 0.7}}, sim::Mode::physical, 20000, 9));
    CHECK(report.vehicles_arrived > 0);
    CHECK(report.vehicles_arrived == report.vehicles_dispatched + report.vehicles_parked_end +
                                         report.vehicles_charging_end);
}

TEST_CASE("parked vehicles make physical response times no worse than abstract") {
    const auto zone = symmetric_toy();
    const auto solution = lp::optimize_policy(zone);
    REQUIRE(solution.status == SolveStatus::optimal);

    const auto abstract_report =
        sim::run(make_sim(zone, solution.policy, sim::Mode::abstract, 200000, 55));
    const auto physical_report =
        sim::run(make_sim(zone, solution.policy, sim::Mode::physical, 200000, 55));
    for (size_t i = 0; i < abstract_report.per_class.size(); ++i) {
        CHECK(physical_report.per_class[i].mean_rt <=
              abstract_report.per_class[i].mean_rt * 1.05 + 0.05);
    }
}

TEST_CASE("validation guards: physical reports and unstable classes are rejected") {
    const auto zone = symmetric_toy();
    const Policy policy{{0.5, 0.5}};
    const auto physical_report = sim::run(make_sim(zone, policy, sim::Mode::physical, 5000, 3));
    CHECK_THROWS_WITH_AS(sim::validate_against_formula(physical_report, zone, policy, 0.05),
                         doctest::Contains("mode mismatch"), ConfigError);

    auto overloaded = zone;
    overloaded.lambda_c = {1.2, 0.4};  // class-1 margin is negative at this policy
    const auto report = sim::run(make_sim(overloaded, policy, sim::Mode::abstract, 5000, 3));
    CHECK_THROWS_WITH_AS(sim::validate_against_formula(report, overloaded, policy, 0.05),
                         doctest::Contains("unstable class"), ConfigError);
}

TEST_CASE("stable charging pool: utilization below one and no growth flag") {
    // 12 classes clears the capacity bound; all-charge is the worst case and
    // still leaves ~5% pool headroom.
    auto zone = reference_zone(12, 10.0);
    const Policy all_charge{std::vector<double>(12, 0.0)};
    const auto report = sim::run(make_sim(zone, all_charge, sim::Mode::physical, 40000, 2718));
    CHECK(report.util_partial < 1.0);
    CHECK(report.util_partial > 0.85);
    CHECK_FALSE(report.pool_diverging);
}

TEST_CASE("undersized class count: the pool queue grows without bound") {
    auto zone = reference_zone(11, 10.0);
    const Policy all_charge{std::vector<double>(11, 0.0)};
    const auto report = sim::run(make_sim(zone, all_charge, sim::Mode::physical, 40000, 2718));
    CHECK(report.pool_diverging);
    CHECK(report.pool_max_queue > 100);
}

TEST_CASE("unstable abstract stations run to the horizon and get flagged") {
    auto zone = symmetric_toy();
    zone.lambda_c = {1.5, 0.1};  // class 1 demand above any attainable supply
    const auto report = sim::run(make_sim(zone, Policy{{0.5, 0.5}}, sim::Mode::abstract, 50000, 5));
    CHECK(report.per_class[0].diverging);
    CHECK(report.per_class[0].max_queue > 100);
    CHECK_FALSE(report.per_class[1].diverging);
}
