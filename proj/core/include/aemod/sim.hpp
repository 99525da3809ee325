#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aemod/model.hpp"

namespace aemod {
namespace sim {

/// abstract: n independent single-server stations, one per customer class,
///   with service rates taken from derive_rates — the solved model, nothing
///   else. Response time is the station sojourn time.
/// physical: vehicle entities flow through the decision point, the charging
///   queues and the per-class parking pools; customers queue for parked
///   vehicles. Response time is the request-to-assignment delay.
enum class Mode { abstract, physical };

const char* to_string(Mode mode);

struct SimConfig {
    ZoneConfig zone;
    Policy policy;
    Mode mode = Mode::abstract;
    double horizon = 1e6;  // simulated minutes
    double warmup = 1e5;   // minutes excluded from statistics
    uint64_t seed = 0;

    void validate() const;  // horizon > warmup >= 0, zone/policy consistent
};

struct ClassStats {
    int cls = 0;  // 1..n
    long long served = 0;
    double mean_rt = 0.0;       // minutes; NaN when no customer completed
    double p95_rt = 0.0;        // histogram estimate; NaN when empty
    double ci_halfwidth = 0.0;  // batch-means 95% halfwidth (20 batches)
    double max_rt = 0.0;
    double mean_in_system = 0.0;  // time-averaged station occupancy (abstract)
                                  // or waiting customers (physical)
    long long max_queue = 0;
    bool diverging = false;  // monotone queue growth across the run
};

struct SimReport {
    Mode mode = Mode::abstract;
    uint64_t seed = 0;
    double horizon = 0.0;
    double warmup = 0.0;
    std::vector<ClassStats> per_class;  // classes 1..n

    // Charging-side observables; physical mode only, zero otherwise.
    double util_partial = 0.0;  // busy-server fraction of the C-point pool
    double util_full = 0.0;
    long long pool_max_queue = 0;
    bool pool_diverging = false;
    long long full_max_queue = 0;
    bool full_diverging = false;

    // Flow-conservation counters (physical mode).
    long long vehicles_arrived = 0;
    long long vehicles_dispatched = 0;
    long long vehicles_parked_end = 0;
    long long vehicles_charging_end = 0;
    long long customers_arrived = 0;
};

/// Run one simulation. Pure function of the config: identical inputs give a
/// bit-identical report. Unstable configurations run to the horizon and set
/// divergence flags instead of failing.
SimReport run(const SimConfig& config);

struct ValidationRow {
    int cls = 0;
    double empirical = 0.0;
    double analytic = 0.0;
    double rel_err = 0.0;
    bool pass = false;
};

/// Compare an abstract-mode report against the closed-form per-class
/// expectation 1/(supply - demand). Throws ConfigError on a physical-mode
/// report (not expected to match) or when some class is analytically
/// unstable.
std::vector<ValidationRow> validate_against_formula(const SimReport& report,
                                                    const ZoneConfig& zone, const Policy& policy,
                                                    double rel_tol);

}  // namespace sim
}  // namespace aemod
