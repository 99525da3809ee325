#include "aemod/stability.hpp"

#include <cmath>

namespace aemod {
namespace stability {

namespace {

// Near-integer bounds are snapped before the strict comparison so that, for
// example, a bound that is mathematically 5 but computes to 4.999999999999999
// still takes the integer branch (yielding 6, not 5, which would violate the
// strict inequality).
constexpr double kIntegerSnapTol = 1e-9;

}  // namespace

std::vector<bool> check_class_stability(const ZoneConfig& config, const DerivedRates& rates) {
    std::vector<bool> out(static_cast<size_t>(config.n_classes));
    for (int i = 1; i <= config.n_classes; ++i)
        out[static_cast<size_t>(i) - 1] = rates.class_rate(i) > config.customer_rate(i);
    return out;
}

ChargingStability check_charging_stability(const ZoneConfig& config, const DerivedRates& rates) {
    ChargingStability out;
    const double pool_capacity =
        static_cast<double>(config.c_points) * static_cast<double>(config.n_classes) * config.mu_c;
    out.partial_ok = rates.partial_load < pool_capacity;
    out.full_ok = rates.full_load < config.mu_c;
    return out;
}

bool demand_within_inflow(const ZoneConfig& config) {
    return config.total_demand() < config.lambda_v;
}

double min_class_count_bound(double lambda_v, int c_points, double mu_c) {
    const double c = static_cast<double>(c_points);
    return lambda_v / (c * mu_c) - 1.0 / c;
}

double min_class_count_bound(const ZoneConfig& config) {
    return min_class_count_bound(config.lambda_v, config.c_points, config.mu_c);
}

int optimal_class_count(double lambda_v, int c_points, double mu_c) {
    const double bound = min_class_count_bound(lambda_v, c_points, mu_c);
    const double snapped = std::round(bound);
    const double tol = kIntegerSnapTol * std::max(1.0, std::abs(bound));
    int n;
    if (std::abs(bound - snapped) <= tol)
        n = static_cast<int>(snapped) + 1;
    else
        n = static_cast<int>(std::ceil(bound));
    return std::max(n, 2);
}

int optimal_class_count(const ZoneConfig& config) {
    return optimal_class_count(config.lambda_v, config.c_points, config.mu_c);
}

StabilityReport analyze(const ZoneConfig& config, const Policy& policy) {
    const auto rates = derive_rates(config, policy);
    StabilityReport report;
    report.per_class_stable = check_class_stability(config, rates);
    const auto charging = check_charging_stability(config, rates);
    report.partial_pool_stable = charging.partial_ok;
    report.full_station_stable = charging.full_ok;
    report.demand_ok = demand_within_inflow(config);
    report.class_count_bound = min_class_count_bound(config);
    report.n_star = optimal_class_count(config);
    return report;
}

}  // namespace stability
}  // namespace aemod
