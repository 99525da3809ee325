#pragma once

#include <optional>
#include <vector>

#include "aemod/errors.hpp"

namespace aemod {

/// Exogenous parameters of one service zone.
///
/// Index conventions (fixed throughout the toolkit):
///   - vehicle SoC classes are 0-based: p[i] is the probability that an
///     arriving vehicle belongs to SoC class i, i = 0..n-1. Class n (full
///     charge) has implicit probability 0 and is never stored.
///   - customer classes are 1-based: lambda_c[i-1] is the arrival rate of
///     Class-i customers, i = 1..n. Class 0 customers do not exist
///     (implicit rate 0).
struct ZoneConfig {
    double lambda_v = 0.0;        // total free-vehicle detection rate, vehicles/min
    double mu_c = 0.0;            // full-charge completion rate, 1/min
    int c_points = 0;             // number of distributed partial-charging points
    int n_classes = 0;            // number of SoC / trip classes n
    std::vector<double> p;        // SoC class probabilities, size n, indices 0..n-1
    std::vector<double> lambda_c; // customer arrival rates, size n, classes 1..n

    /// Arrival rate of Class-i customers, i in 1..n.
    double customer_rate(int cls) const { return lambda_c.at(static_cast<size_t>(cls) - 1); }
    /// SoC probability of vehicle class i, i in 0..n (class n is always 0).
    double soc_prob(int cls) const {
        return cls == n_classes ? 0.0 : p.at(static_cast<size_t>(cls));
    }
    double total_demand() const;

    /// Throws ConfigError unless all invariants hold: positive rates,
    /// c_points >= 1, n_classes >= 2, vector sizes n, entries in range and
    /// sum(p) = 1 within 1e-12. Out-of-tolerance p is rejected, never
    /// silently renormalized.
    void validate() const;
};

/// Dispatch/charge decision vector q, size n.
///
/// q[0] is the probability that a depleted (class-0) vehicle fully charges;
/// q[i] for i >= 1 is the probability that a class-i vehicle serves its own
/// class directly. Complements 1-q[i] (partial charge to class i+1) are
/// never stored.
struct Policy {
    std::vector<double> q;

    void validate() const;  // each q[i] in [0,1]
};

/// Per-class vehicle supply rates and charging-queue loads implied by a
/// (config, policy) pair.
struct DerivedRates {
    std::vector<double> lambda_v_class;  // supply rate of class i at [i-1], i = 1..n
    double partial_load = 0.0;           // total inflow to the C-point partial pool
    double full_load = 0.0;              // inflow to the full-charging station

    double class_rate(int cls) const { return lambda_v_class.at(static_cast<size_t>(cls) - 1); }
};

/// Vehicle supply rates seen by each customer class:
///   class i (1..n-1): lambda_v * (p[i-1]*(1-q[i-1]) + p[i]*q[i])
///   class n:          lambda_v * (p[n-1]*(1-q[n-1]) + p[0]*q[0])
/// plus the two charging loads. Throws ConfigError on size mismatch.
DerivedRates derive_rates(const ZoneConfig& config, const Policy& policy);

/// Expected response time of each class in minutes: 1/(supply - demand)
/// when the class is stable, nullopt (infinite) otherwise. Instability is
/// a value here, never an error.
std::vector<std::optional<double>> response_times(const ZoneConfig& config,
                                                  const DerivedRates& rates);

struct MaxResponseTime {
    std::optional<double> minutes;  // nullopt when some class is unstable
    int worst_class = 0;            // 1-based argmax class; ties break low
};

/// Worst-class expected response time under a policy. Infinite as soon as
/// any class has supply <= demand; the reported class is then the first
/// unstable one.
MaxResponseTime max_response_time(const ZoneConfig& config, const Policy& policy);

/// Mean of the per-class expected response times; nullopt if any class is
/// unstable.
std::optional<double> mean_response_time(const std::vector<std::optional<double>>& rts);

}  // namespace aemod
