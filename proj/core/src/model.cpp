#include "aemod/model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace aemod {

namespace {

constexpr double kProbSumTol = 1e-12;

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

}  // namespace

double ZoneConfig::total_demand() const {
    return std::accumulate(lambda_c.begin(), lambda_c.end(), 0.0);
}

void ZoneConfig::validate() const {
    require(std::isfinite(lambda_v) && lambda_v > 0.0, "lambda_v must be > 0");
    require(std::isfinite(mu_c) && mu_c > 0.0, "mu_c must be > 0");
    require(c_points >= 1, "c_points must be >= 1");
    require(n_classes >= 2, "n_classes must be >= 2");
    const auto n = static_cast<size_t>(n_classes);
    if (p.size() != n) {
        std::ostringstream os;
        os << "p has " << p.size() << " entries, expected n_classes = " << n_classes;
        throw ConfigError(os.str());
    }
    if (lambda_c.size() != n) {
        std::ostringstream os;
        os << "lambda_c has " << lambda_c.size() << " entries, expected n_classes = " << n_classes;
        throw ConfigError(os.str());
    }
    double sum = 0.0;
    for (size_t i = 0; i < n; ++i) {
        require(std::isfinite(p[i]) && p[i] >= 0.0 && p[i] <= 1.0, "p entries must be in [0,1]");
        sum += p[i];
    }
    if (std::abs(sum - 1.0) > kProbSumTol) {
        std::ostringstream os;
        os.precision(17);
        os << "p must sum to 1 within 1e-12 (got " << sum << "); renormalize explicitly if intended";
        throw ConfigError(os.str());
    }
    for (double rate : lambda_c)
        require(std::isfinite(rate) && rate >= 0.0, "lambda_c entries must be >= 0");
}

void Policy::validate() const {
    for (double qi : q) {
        if (!(std::isfinite(qi) && qi >= 0.0 && qi <= 1.0))
            throw ConfigError("policy entries must be in [0,1]");
    }
}

DerivedRates derive_rates(const ZoneConfig& config, const Policy& policy) {
    const int n = config.n_classes;
    if (policy.q.size() != static_cast<size_t>(n)) {
        std::ostringstream os;
        os << "policy has " << policy.q.size() << " entries, config has n_classes = " << n;
        throw ConfigError(os.str());
    }
    const auto& p = config.p;
    const auto& q = policy.q;

    DerivedRates out;
    out.lambda_v_class.resize(static_cast<size_t>(n));
    for (int i = 1; i < n; ++i) {
        out.lambda_v_class[static_cast<size_t>(i) - 1] =
            config.lambda_v * (p[static_cast<size_t>(i) - 1] * (1.0 - q[static_cast<size_t>(i) - 1]) +
                               p[static_cast<size_t>(i)] * q[static_cast<size_t>(i)]);
    }
    // Class n is fed by class n-1 partial charges and class 0 full charges.
    out.lambda_v_class[static_cast<size_t>(n) - 1] =
        config.lambda_v *
        (p[static_cast<size_t>(n) - 1] * (1.0 - q[static_cast<size_t>(n) - 1]) + p[0] * q[0]);

    double partial = 0.0;
    for (int i = 0; i < n; ++i)
        partial += config.lambda_v * p[static_cast<size_t>(i)] * (1.0 - q[static_cast<size_t>(i)]);
    out.partial_load = partial;
    out.full_load = config.lambda_v * p[0] * q[0];
    return out;
}

std::vector<std::optional<double>> response_times(const ZoneConfig& config,
                                                  const DerivedRates& rates) {
    std::vector<std::optional<double>> out(static_cast<size_t>(config.n_classes));
    for (int i = 1; i <= config.n_classes; ++i) {
        const double margin = rates.class_rate(i) - config.customer_rate(i);
        if (margin > 0.0)
            out[static_cast<size_t>(i) - 1] = 1.0 / margin;
    }
    return out;
}

MaxResponseTime max_response_time(const ZoneConfig& config, const Policy& policy) {
    const auto rates = derive_rates(config, policy);
    const auto rts = response_times(config, rates);

    MaxResponseTime out;
    for (int i = 1; i <= config.n_classes; ++i) {
        const auto& rt = rts[static_cast<size_t>(i) - 1];
        if (!rt.has_value()) {
            out.minutes = std::nullopt;
            out.worst_class = i;
            return out;
        }
        if (!out.minutes.has_value() || *rt > *out.minutes) {
            out.minutes = *rt;
            out.worst_class = i;
        }
    }
    return out;
}

std::optional<double> mean_response_time(const std::vector<std::optional<double>>& rts) {
    double sum = 0.0;
    for (const auto& rt : rts) {
        if (!rt.has_value()) return std::nullopt;
        sum += *rt;
    }
    return rts.empty() ? std::nullopt : std::optional<double>(sum / static_cast<double>(rts.size()));
}

}  // namespace aemod
