#pragma once

#include <vector>

#include "aemod/model.hpp"

namespace aemod {
namespace stability {

struct ChargingStability {
    bool partial_ok = false;  // sum of partial-charge inflow < C * n * mu_c
    bool full_ok = false;     // full-charge inflow < mu_c
};

/// Admissibility summary for one (config, policy) pair.
struct StabilityReport {
    std::vector<bool> per_class_stable;  // supply > demand, strictly, per class 1..n
    bool partial_pool_stable = false;
    bool full_station_stable = false;
    bool demand_ok = false;              // total customer demand strictly below lambda_v
    double class_count_bound = 0.0;      // lower bound the class count must strictly exceed
    int n_star = 0;                      // smallest admissible class count, >= 2
};

/// Strict per-class test: supply rate > customer arrival rate.
std::vector<bool> check_class_stability(const ZoneConfig& config, const DerivedRates& rates);

/// Strict load tests for the two charging queues.
ChargingStability check_charging_stability(const ZoneConfig& config, const DerivedRates& rates);

/// True iff total customer demand is strictly below the vehicle inflow
/// rate. Necessary for any policy to stabilize every class.
bool demand_within_inflow(const ZoneConfig& config);

/// Lower bound on the class count imposed by the zone's charging capacity:
/// lambda_v / (C * mu_c) - 1 / C. Any admissible n must strictly exceed it.
double min_class_count_bound(double lambda_v, int c_points, double mu_c);
double min_class_count_bound(const ZoneConfig& config);

/// Smallest class count strictly above min_class_count_bound: bound + 1
/// when the bound is an integer, ceil(bound) otherwise; clamped to >= 2
/// (a 1-class zone has no partial-charge semantics).
int optimal_class_count(double lambda_v, int c_points, double mu_c);
int optimal_class_count(const ZoneConfig& config);

/// Full report for a (config, policy) pair.
StabilityReport analyze(const ZoneConfig& config, const Policy& policy);

}  // namespace stability
}  // namespace aemod
