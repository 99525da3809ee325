#include "aemod/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "aemod/stability.hpp"

namespace aemod {
namespace scenarios {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

const char* to_string(ShapeKind kind) {
    switch (kind) {
        case ShapeKind::uniform: return "uniform";
        case ShapeKind::gaussian: return "gaussian";
        case ShapeKind::increasing: return "increasing";
        case ShapeKind::decreasing: return "decreasing";
    }
    return "unknown";
}

DistShape shape_from_string(const std::string& name) {
    for (ShapeKind kind : {ShapeKind::uniform, ShapeKind::gaussian, ShapeKind::increasing,
                           ShapeKind::decreasing}) {
        if (name == to_string(kind)) return DistShape{kind};
    }
    throw ConfigError("unknown distribution shape: " + name);
}

std::vector<double> make_distribution(const DistShape& shape, int n, double target_sum) {
    if (n < 2) throw ConfigError("distributions need n >= 2");
    if (!(target_sum >= 0.0)) throw ConfigError("distribution target sum must be >= 0");
    std::vector<double> w(static_cast<size_t>(n), 1.0);
    switch (shape.kind) {
        case ShapeKind::uniform:
            break;
        case ShapeKind::increasing:
            for (int k = 0; k < n; ++k)
                w[static_cast<size_t>(k)] = 1.0 + 2.0 * k / static_cast<double>(n - 1);
            break;
        case ShapeKind::decreasing:
            for (int k = 0; k < n; ++k)
                w[static_cast<size_t>(k)] = 3.0 - 2.0 * k / static_cast<double>(n - 1);
            break;
        case ShapeKind::gaussian: {
            const double mean = shape.mean < 0.0 ? (n - 1) / 2.0 : shape.mean;
            const double spread = shape.spread <= 0.0 ? n / 4.0 : shape.spread;
            for (int k = 0; k < n; ++k) {
                const double z = (k - mean) / spread;
                w[static_cast<size_t>(k)] = std::exp(-0.5 * z * z);
            }
            break;
        }
    }
    double sum = 0.0;
    for (double v : w) sum += v;
    for (double& v : w) v *= target_sum / sum;
    return w;
}

const char* to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::optimal: return "optimal";
        case PolicyKind::always_charge: return "always_charge";
        case PolicyKind::always_charge_literal: return "always_charge_literal";
        case PolicyKind::equal_split: return "equal_split";
        case PolicyKind::explicit_q: return "explicit";
    }
    return "unknown";
}

PolicyKind policy_kind_from_string(const std::string& name) {
    for (PolicyKind kind : {PolicyKind::optimal, PolicyKind::always_charge,
                            PolicyKind::always_charge_literal, PolicyKind::equal_split,
                            PolicyKind::explicit_q}) {
        if (name == to_string(kind)) return kind;
    }
    throw ConfigError("unknown policy kind: " + name);
}

Policy make_policy(PolicyKind kind, int n, const lp::LpSolution* solution) {
    Policy policy;
    switch (kind) {
        case PolicyKind::optimal:
            if (solution == nullptr || solution->status != SolveStatus::optimal)
                throw ConfigError("optimal policy requested without an optimal solution");
            return solution->policy;
        case PolicyKind::always_charge:
            policy.q.assign(static_cast<size_t>(n), 0.0);
            return policy;
        case PolicyKind::always_charge_literal:
            policy.q.assign(static_cast<size_t>(n), 1.0);
            return policy;
        case PolicyKind::equal_split:
            policy.q.assign(static_cast<size_t>(n), 0.5);
            return policy;
        case PolicyKind::explicit_q:
            throw ConfigError("explicit policies are built from their vector, not by kind");
    }
    throw ConfigError("unknown policy kind");
}

namespace {

struct PolicyEval {
    double r_star = kNaN;
    double max_rt = kNaN;
    double avg_rt = kNaN;
    bool stable = false;
};

PolicyEval evaluate_policy(const ZoneConfig& config, const Policy& policy) {
    const DerivedRates rates = derive_rates(config, policy);
    PolicyEval out;
    double min_margin = kInf;
    for (int i = 1; i <= config.n_classes; ++i)
        min_margin = std::min(min_margin, rates.class_rate(i) - config.customer_rate(i));
    out.r_star = min_margin;

    const auto rts = response_times(config, rates);
    double max_rt = 0.0, sum_rt = 0.0;
    bool all_stable = true;
    for (const auto& rt : rts) {
        if (!rt.has_value()) {
            all_stable = false;
            break;
        }
        max_rt = std::max(max_rt, *rt);
        sum_rt += *rt;
    }
    if (all_stable) {
        out.max_rt = max_rt;
        out.avg_rt = sum_rt / static_cast<double>(config.n_classes);
    } else {
        out.max_rt = kInf;
        out.avg_rt = kInf;
    }
    const auto charging = stability::check_charging_stability(config, rates);
    out.stable = all_stable && charging.partial_ok && charging.full_ok;
    return out;
}

}  // namespace

std::vector<SweepRow> sweep(const SweepSpec& spec) {
    if (spec.n_values.empty() || spec.p_shapes.empty() || spec.c_shapes.empty() ||
        spec.loads.empty() || spec.policies.empty())
        throw ConfigError("sweep spec needs at least one value per axis");

    std::vector<SweepRow> rows;
    int point = 0;
    for (int n : spec.n_values) {
        for (const auto& p_shape : spec.p_shapes) {
            for (const auto& c_shape : spec.c_shapes) {
                for (double load : spec.loads) {
                    ZoneConfig config;
                    config.lambda_v = spec.lambda_v;
                    config.mu_c = spec.mu_c;
                    config.c_points = spec.c_points;
                    config.n_classes = n;
                    config.p = make_distribution(p_shape, n, 1.0);
                    config.lambda_c = make_distribution(c_shape, n, load);
                    config.validate();

                    for (PolicyKind kind : spec.policies) {
                        SweepRow row;
                        row.sweep_id = spec.sweep_id;
                        row.point = point;
                        row.lambda_v = spec.lambda_v;
                        row.mu_c = spec.mu_c;
                        row.c_points = spec.c_points;
                        row.n = n;
                        row.sum_lambda_c = load;
                        row.p_shape = to_string(p_shape.kind);
                        row.c_shape = to_string(c_shape.kind);
                        row.policy = to_string(kind);

                        std::optional<Policy> policy;
                        if (kind == PolicyKind::optimal) {
                            try {
                                const lp::LpSolution sol = lp::optimize_policy(config);
                                if (sol.status == SolveStatus::optimal) policy = sol.policy;
                            } catch (const InfeasibleError&) {
                                // flagged row below
                            }
                        } else if (kind == PolicyKind::explicit_q) {
                            if (!spec.explicit_policy.has_value())
                                throw ConfigError("sweep lists an explicit policy but none was given");
                            policy = *spec.explicit_policy;
                        } else {
                            policy = make_policy(kind, n);
                        }

                        if (policy.has_value()) {
                            const PolicyEval eval = evaluate_policy(config, *policy);
                            row.r_star = eval.r_star;
                            row.max_rt = eval.max_rt;
                            row.avg_rt = eval.avg_rt;
                            row.stable = eval.stable;
                        }
                        rows.push_back(std::move(row));
                    }
                    ++point;
                }
            }
        }
    }
    return rows;
}

namespace {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

}  // namespace

std::string to_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "sweep_id,point,lambda_v,mu_c,C,n,sum_lambda_c,p_shape,c_shape,policy,"
          "R_star,max_rt_min,avg_rt_min,stable\n";
    for (const auto& r : rows) {
        os << r.sweep_id << ',' << r.point << ',' << format_double(r.lambda_v) << ','
           << format_double(r.mu_c) << ',' << r.c_points << ',' << r.n << ','
           << format_double(r.sum_lambda_c) << ',' << r.p_shape << ',' << r.c_shape << ','
           << r.policy << ',' << format_double(r.r_star) << ',' << format_double(r.max_rt) << ','
           << format_double(r.avg_rt) << ',' << (r.stable ? 1 : 0) << '\n';
    }
    return os.str();
}

}  // namespace scenarios
}  // namespace aemod
