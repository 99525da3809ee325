#include "aemod/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace aemod {
namespace io {

namespace {

void reject_unknown_fields(const json& j, const std::set<std::string>& allowed,
                           const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (allowed.count(it.key()) == 0)
            throw ConfigError("unknown field \"" + it.key() + "\" in " + where);
    }
}

double require_number(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError("missing field \"" + key + "\" in " + where);
    if (!j.at(key).is_number()) throw ConfigError("field \"" + key + "\" in " + where + " must be a number");
    return j.at(key).get<double>();
}

int require_int(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError("missing field \"" + key + "\" in " + where);
    if (!j.at(key).is_number_integer())
        throw ConfigError("field \"" + key + "\" in " + where + " must be an integer");
    return j.at(key).get<int>();
}

std::vector<double> number_array(const json& j, const std::string& key, const std::string& where) {
    const auto& a = j.at(key);
    if (!a.is_array()) throw ConfigError("field \"" + key + "\" in " + where + " must be an array");
    std::vector<double> out;
    for (const auto& v : a) {
        if (!v.is_number()) throw ConfigError("field \"" + key + "\" in " + where + " must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

json finite_or_string(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

}  // namespace

ZoneConfig zone_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("zone config must be a JSON object");
    reject_unknown_fields(
        j, {"lambda_v", "mu_c", "c_points", "n_classes", "p", "p_shape", "lambda_c", "c_shape",
            "sum_lambda_c"},
        "zone config");

    ZoneConfig config;
    config.lambda_v = require_number(j, "lambda_v", "zone config");
    config.mu_c = require_number(j, "mu_c", "zone config");
    config.c_points = require_int(j, "c_points", "zone config");
    config.n_classes = require_int(j, "n_classes", "zone config");

    const bool has_p = j.contains("p");
    const bool has_p_shape = j.contains("p_shape");
    if (has_p == has_p_shape)
        throw ConfigError("zone config needs exactly one of \"p\" or \"p_shape\"");
    if (has_p) {
        config.p = number_array(j, "p", "zone config");
    } else {
        config.p = scenarios::make_distribution(
            scenarios::shape_from_string(j.at("p_shape").get<std::string>()), config.n_classes, 1.0);
    }

    const bool has_lc = j.contains("lambda_c");
    const bool has_c_shape = j.contains("c_shape") || j.contains("sum_lambda_c");
    if (has_lc == has_c_shape)
        throw ConfigError(
            "zone config needs exactly one of \"lambda_c\" or \"c_shape\"+\"sum_lambda_c\"");
    if (has_lc) {
        config.lambda_c = number_array(j, "lambda_c", "zone config");
    } else {
        if (!j.contains("c_shape") || !j.contains("sum_lambda_c"))
            throw ConfigError("shape-based demand needs both \"c_shape\" and \"sum_lambda_c\"");
        config.lambda_c = scenarios::make_distribution(
            scenarios::shape_from_string(j.at("c_shape").get<std::string>()), config.n_classes,
            require_number(j, "sum_lambda_c", "zone config"));
    }

    config.validate();
    return config;
}

json to_json(const ZoneConfig& config) {
    return json{{"lambda_v", config.lambda_v}, {"mu_c", config.mu_c},
                {"c_points", config.c_points}, {"n_classes", config.n_classes},
                {"p", config.p},               {"lambda_c", config.lambda_c}};
}

Policy policy_from_json(const json& j) {
    Policy policy;
    if (j.is_array()) {
        for (const auto& v : j) policy.q.push_back(v.get<double>());
    } else if (j.is_object()) {
        reject_unknown_fields(j, {"q"}, "policy");
        policy.q = number_array(j, "q", "policy");
    } else {
        throw ConfigError("policy must be an array or an object with a \"q\" array");
    }
    policy.validate();
    return policy;
}

json to_json(const Policy& policy) {
    return json{{"q", policy.q}};
}

SimJob sim_job_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("simulation config must be a JSON object");
    reject_unknown_fields(j, {"zone", "policy", "mode", "horizon", "warmup", "seed"},
                          "simulation config");
    if (!j.contains("zone")) throw ConfigError("missing field \"zone\" in simulation config");

    SimJob job;
    job.config.zone = zone_from_json(j.at("zone"));

    if (j.contains("policy") && j.at("policy").is_string()) {
        job.policy_kind = scenarios::policy_kind_from_string(j.at("policy").get<std::string>());
    } else if (j.contains("policy")) {
        job.config.policy = policy_from_json(j.at("policy"));
    } else {
        job.policy_kind = scenarios::PolicyKind::optimal;
    }

    if (j.contains("mode")) {
        const std::string mode = j.at("mode").get<std::string>();
        if (mode == "abstract")
            job.config.mode = sim::Mode::abstract;
        else if (mode == "physical")
            job.config.mode = sim::Mode::physical;
        else
            throw ConfigError("mode must be \"abstract\" or \"physical\"");
    }
    job.config.horizon = j.contains("horizon") ? require_number(j, "horizon", "simulation config") : 1e6;
    job.config.warmup = j.contains("warmup") ? require_number(j, "warmup", "simulation config")
                                             : job.config.horizon * 0.1;
    job.seed_in_file = j.contains("seed");
    job.config.seed = job.seed_in_file ? j.at("seed").get<uint64_t>() : 0;
    return job;
}

json to_json(const sim::SimReport& report) {
    json per_class = json::array();
    for (const auto& c : report.per_class) {
        per_class.push_back(json{{"class", c.cls},
                                 {"served", c.served},
                                 {"mean_rt_min", finite_or_string(c.mean_rt)},
                                 {"p95_rt_min", finite_or_string(c.p95_rt)},
                                 {"ci_halfwidth", finite_or_string(c.ci_halfwidth)},
                                 {"max_rt_min", finite_or_string(c.max_rt)},
                                 {"mean_in_system", c.mean_in_system},
                                 {"max_queue", c.max_queue},
                                 {"diverging", c.diverging}});
    }
    return json{{"mode", sim::to_string(report.mode)},
                {"seed", report.seed},
                {"horizon", report.horizon},
                {"warmup", report.warmup},
                {"per_class", per_class},
                {"util_partial", report.util_partial},
                {"util_full", report.util_full},
                {"pool_max_queue", report.pool_max_queue},
                {"pool_diverging", report.pool_diverging},
                {"full_max_queue", report.full_max_queue},
                {"full_diverging", report.full_diverging},
                {"vehicles_arrived", report.vehicles_arrived},
                {"vehicles_dispatched", report.vehicles_dispatched},
                {"vehicles_parked_end", report.vehicles_parked_end},
                {"vehicles_charging_end", report.vehicles_charging_end},
                {"customers_arrived", report.customers_arrived}};
}

std::string sim_report_csv_header() {
    return "mode,seed,class,mean_rt_min,p95_rt_min,ci_halfwidth,served,util_partial,util_full\n";
}

std::string sim_report_csv_rows(const sim::SimReport& report) {
    std::ostringstream os;
    os.precision(12);
    for (const auto& c : report.per_class) {
        os << sim::to_string(report.mode) << ',' << report.seed << ',' << c.cls << ',' << c.mean_rt
           << ',' << c.p95_rt << ',' << c.ci_halfwidth << ',' << c.served << ','
           << report.util_partial << ',' << report.util_full << '\n';
    }
    return os.str();
}

json to_json(const lp::LpProblem& problem) {
    json kinds = json::array();
    for (const auto& tag : problem.row_kind) {
        std::string s = lp::to_string(tag.kind);
        if (tag.index >= 0) s += ":" + std::to_string(tag.index);
        kinds.push_back(s);
    }
    return json{{"n", problem.n},
                {"rows", problem.materialized_rows()},
                {"nominal_rows", problem.nominal_rows()},
                {"cols", problem.cols()},
                {"a_row_major", problem.a.data},
                {"b", problem.b},
                {"c", problem.c},
                {"row_kind", kinds}};
}

json to_json(const lp::LpSolution& solution) {
    json j{{"status", to_string(solution.status)}, {"iterations", solution.iterations}};
    if (solution.status == SolveStatus::optimal) {
        j["policy"] = to_json(solution.policy);
        j["r_star"] = solution.r_star;
        j["max_rt_min"] = 1.0 / solution.r_star;
        j["alpha"] = solution.duals.alpha;
        j["beta"] = solution.duals.beta;
        j["gamma"] = solution.duals.gamma;
        j["omega"] = solution.duals.omega;
        j["duals_cross_checked"] = solution.duals_cross_checked;
        if (solution.duals_cross_checked) j["dual_r_star"] = solution.dual_r_star;
    }
    return j;
}

Policy policy_from_solution_json(const json& j) {
    if (j.is_object() && j.contains("policy")) return policy_from_json(j.at("policy"));
    return policy_from_json(j);
}

json to_json(const lp::KktReport& report) {
    const char* overall = report.overall == lp::KktReport::Overall::pass        ? "pass"
                          : report.overall == lp::KktReport::Overall::degenerate ? "degenerate"
                                                                                  : "fail";
    json decisions = json::array();
    for (const auto& d : report.decisions) {
        const char* kind = nullptr;
        switch (d.kind) {
            case lp::KktCase::pinned_zero: kind = "pinned_zero"; break;
            case lp::KktCase::pinned_one: kind = "pinned_one"; break;
            case lp::KktCase::interior: kind = "interior"; break;
            case lp::KktCase::tie_inactive: kind = "tie_inactive"; break;
            case lp::KktCase::zero_probability: kind = "zero_probability"; break;
        }
        json entry{{"decision", d.decision}, {"case", kind},          {"ok", d.ok},
                   {"alpha_up", d.alpha_up}, {"alpha_down", d.alpha_down},
                   {"q_observed", d.q_observed}};
        if (d.q_expected.has_value()) entry["q_expected"] = *d.q_expected;
        if (!d.note.empty()) entry["note"] = d.note;
        decisions.push_back(entry);
    }
    return json{{"overall", overall},
                {"decisions", decisions},
                {"stationarity_ok", report.stationarity_ok},
                {"complementary_ok", report.complementary_ok},
                {"charging_duals_zero", report.charging_duals_zero},
                {"r_lower_dual_zero", report.r_lower_dual_zero},
                {"violations", report.violations}};
}

scenarios::SweepSpec sweep_spec_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("sweep spec must be a JSON object");
    reject_unknown_fields(j,
                          {"sweep_id", "lambda_v", "mu_c", "c_points", "n_classes", "p_shape",
                           "c_shape", "sum_lambda_c", "policies", "q"},
                          "sweep spec");

    scenarios::SweepSpec spec;
    spec.sweep_id = j.contains("sweep_id") ? j.at("sweep_id").get<std::string>() : "sweep";
    spec.lambda_v = require_number(j, "lambda_v", "sweep spec");
    spec.mu_c = require_number(j, "mu_c", "sweep spec");
    spec.c_points = require_int(j, "c_points", "sweep spec");

    if (!j.contains("n_classes")) throw ConfigError("missing field \"n_classes\" in sweep spec");
    if (j.at("n_classes").is_array()) {
        for (const auto& v : j.at("n_classes")) spec.n_values.push_back(v.get<int>());
    } else {
        spec.n_values.push_back(require_int(j, "n_classes", "sweep spec"));
    }

    auto shapes = [&](const char* key) {
        std::vector<scenarios::DistShape> out;
        if (!j.contains(key)) {
            out.push_back(scenarios::DistShape{});
            return out;
        }
        if (j.at(key).is_array()) {
            for (const auto& v : j.at(key)) out.push_back(scenarios::shape_from_string(v.get<std::string>()));
        } else {
            out.push_back(scenarios::shape_from_string(j.at(key).get<std::string>()));
        }
        return out;
    };
    spec.p_shapes = shapes("p_shape");
    spec.c_shapes = shapes("c_shape");

    if (!j.contains("sum_lambda_c")) throw ConfigError("missing field \"sum_lambda_c\" in sweep spec");
    const auto& load = j.at("sum_lambda_c");
    if (load.is_number()) {
        spec.loads.push_back(load.get<double>());
    } else if (load.is_array()) {
        for (const auto& v : load) spec.loads.push_back(v.get<double>());
    } else if (load.is_object()) {
        reject_unknown_fields(load, {"from", "to", "steps"}, "sum_lambda_c range");
        const double from = require_number(load, "from", "sum_lambda_c range");
        const double to = require_number(load, "to", "sum_lambda_c range");
        const int steps = require_int(load, "steps", "sum_lambda_c range");
        if (steps < 1) throw ConfigError("sum_lambda_c range needs steps >= 1");
        for (int k = 0; k < steps; ++k)
            spec.loads.push_back(steps == 1 ? from : from + (to - from) * k / (steps - 1.0));
    } else {
        throw ConfigError("sum_lambda_c must be a number, array, or {from,to,steps}");
    }

    if (j.contains("policies")) {
        for (const auto& v : j.at("policies"))
            spec.policies.push_back(scenarios::policy_kind_from_string(v.get<std::string>()));
    } else {
        spec.policies.push_back(scenarios::PolicyKind::optimal);
    }
    if (j.contains("q")) spec.explicit_policy = policy_from_json(j.at("q"));
    return spec;
}

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("JSON parse error in " + path + ": " + e.what());
    }
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + tmp);
        out << content;
        if (!out.good()) throw ConfigError("short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw ConfigError("cannot rename " + tmp + " to " + path);
}

}  // namespace io
}  // namespace aemod
