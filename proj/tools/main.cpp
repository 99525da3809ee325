// aemod: planning toolkit for a single autonomous-electric-vehicle service
// zone. Subcommands cover the class-count rule, exact policy optimization
// with duality/KKT verification, experiment sweeps, discrete-event
// simulation, and baseline comparisons.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "aemod/json_io.hpp"
#include "aemod/stability.hpp"
#include "manifest.hpp"

namespace {

using namespace aemod;
using io::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitSolverFailure = 3;

double elapsed_sec(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty())
        std::cout << content;
    else
        io::write_file_atomic(out_path, content);
}

// ---------------------------------------------------------------- nstar --

struct NstarParams {
    double lambda_v = 0.0;
    double mu_c = 0.0;
    int c_points = 0;
};

NstarParams nstar_params(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    // Accepts a full zone config; only the three capacity parameters are used.
    for (auto it = j.begin(); it != j.end(); ++it) {
        static const std::set<std::string> allowed{"lambda_v", "mu_c",     "c_points",
                                                   "n_classes", "p",        "p_shape",
                                                   "lambda_c", "c_shape",  "sum_lambda_c"};
        if (allowed.count(it.key()) == 0)
            throw ConfigError("unknown field \"" + it.key() + "\" in config");
    }
    NstarParams params;
    params.lambda_v = j.at("lambda_v").get<double>();
    params.mu_c = j.at("mu_c").get<double>();
    params.c_points = j.at("c_points").get<int>();
    if (!(params.lambda_v > 0.0) || !(params.mu_c > 0.0) || params.c_points < 1)
        throw ConfigError("nstar needs lambda_v > 0, mu_c > 0, c_points >= 1");
    return params;
}

int cmd_nstar(const std::string& config_path) {
    const NstarParams params = nstar_params(io::parse_file(config_path));
    const double bound =
        stability::min_class_count_bound(params.lambda_v, params.c_points, params.mu_c);
    const int n_star = stability::optimal_class_count(params.lambda_v, params.c_points, params.mu_c);
    char line[64];
    std::snprintf(line, sizeof line, "bound=%.4f n*=%d\n", bound, n_star);
    std::cout << line;
    return kExitOk;
}

// -------------------------------------------------------------- optimize --

json evaluation_json(const ZoneConfig& zone, const Policy& policy, const std::string& kind) {
    const DerivedRates rates = derive_rates(zone, policy);
    const auto rts = response_times(zone, rates);
    const auto worst = max_response_time(zone, policy);
    const auto avg = mean_response_time(rts);
    const auto charging = stability::check_charging_stability(zone, rates);

    double min_margin = rates.class_rate(1) - zone.customer_rate(1);
    for (int i = 2; i <= zone.n_classes; ++i)
        min_margin = std::min(min_margin, rates.class_rate(i) - zone.customer_rate(i));

    json per_class = json::array();
    for (const auto& rt : rts)
        per_class.push_back(rt.has_value() ? json(*rt) : json("inf"));

    bool classes_stable = worst.minutes.has_value();
    return json{{"policy", io::to_json(policy)},
                {"policy_kind", kind},
                {"r_star", min_margin},
                {"max_rt_min", worst.minutes.has_value() ? json(*worst.minutes) : json("inf")},
                {"worst_class", worst.worst_class},
                {"avg_rt_min", avg.has_value() ? json(*avg) : json("inf")},
                {"per_class_rt_min", per_class},
                {"stable", classes_stable && charging.partial_ok && charging.full_ok}};
}

int diagnose_infeasible(const ZoneConfig& zone, const std::string& detail) {
    std::ostringstream os;
    os << "infeasible: " << detail;
    const double bound = stability::min_class_count_bound(zone);
    if (!stability::demand_within_inflow(zone)) {
        os << "; total arrival rate of the customers (" << zone.total_demand()
           << "/min) is not strictly below the total arrival rate of the vehicles ("
           << zone.lambda_v << "/min)";
    }
    if (zone.n_classes <= bound) {
        os << "; n_classes=" << zone.n_classes
           << " does not strictly exceed the charging-capacity bound " << bound
           << " (smallest admissible count: " << stability::optimal_class_count(zone) << ")";
    }
    std::cerr << os.str() << "\n";
    return kExitInfeasible;
}

int cmd_optimize(const std::string& config_path, const std::string& policy_kind,
                 const std::string& policy_file, bool verify, const std::string& out_path,
                 const std::string& dump_lp_path) {
    const auto start = std::chrono::steady_clock::now();
    const ZoneConfig zone = io::zone_from_json(io::parse_file(config_path));

    // Evaluation-only mode: a fixed policy is scored without touching the
    // solver.
    if ((!policy_kind.empty() && policy_kind != "optimal") || !policy_file.empty()) {
        Policy policy;
        std::string kind_name;
        if (!policy_file.empty()) {
            policy = io::policy_from_solution_json(io::parse_file(policy_file));
            kind_name = "explicit";
        } else {
            const auto kind = scenarios::policy_kind_from_string(policy_kind);
            policy = scenarios::make_policy(kind, zone.n_classes);
            kind_name = policy_kind;
        }
        if (policy.q.size() != static_cast<size_t>(zone.n_classes))
            throw ConfigError("policy length does not match n_classes");
        emit(out_path, evaluation_json(zone, policy, kind_name).dump(2) + "\n");
        if (!out_path.empty()) {
            cli::RunManifest manifest{"optimize", config_path,
                                      json{{"policy", kind_name}, {"policy_file", policy_file}},
                                      {out_path}, elapsed_sec(start)};
            manifest.write();
        }
        return kExitOk;
    }

    lp::LpProblem problem;
    try {
        problem = lp::build_problem(zone);
    } catch (const InfeasibleError& e) {
        return diagnose_infeasible(zone, e.what());
    }
    if (!dump_lp_path.empty()) io::write_file_atomic(dump_lp_path, io::to_json(problem).dump(2) + "\n");

    const lp::LpSolution solution = lp::optimize_policy(zone);
    if (solution.status != SolveStatus::optimal)
        return diagnose_infeasible(zone, "no policy attains a positive response-rate margin");

    json out = io::to_json(solution);
    bool verified = true;
    if (verify) {
        const double estimate = lp::dual_rate_estimate(zone, solution.duals);
        const double gap = std::abs(solution.r_star - solution.dual_r_star);
        const double estimate_gap = std::abs(solution.r_star - estimate);
        const lp::KktReport kkt = lp::verify_kkt(zone, solution);
        const double tol = 1e-6 * std::max(1.0, solution.r_star);

        // Solver consistency must hold on every optimal solve. The
        // closed-form rate recovery and the three-case decision table are
        // additionally claimed only while the charging rows stay slack; with
        // a binding charging row they are reported but out of scope.
        const bool solver_consistent =
            gap <= tol && kkt.complementary_ok && kkt.stationarity_ok && kkt.r_lower_dual_zero;
        const bool slack_regime = kkt.charging_duals_zero;
        const bool closed_form_ok =
            !slack_regime ||
            (estimate_gap <= tol && kkt.overall != lp::KktReport::Overall::fail);
        verified = solver_consistent && closed_form_ok;
        out["verification"] = json{{"duality_gap", gap},
                                   {"solver_consistent", solver_consistent},
                                   {"charging_regime", slack_regime ? "slack" : "binding"},
                                   {"dual_rate_estimate", estimate},
                                   {"dual_rate_estimate_gap", estimate_gap},
                                   {"closed_form_applicable", slack_regime},
                                   {"tolerance", tol},
                                   {"kkt", io::to_json(kkt)},
                                   {"pass", verified}};
    }
    emit(out_path, out.dump(2) + "\n");
    if (!out_path.empty()) {
        cli::RunManifest manifest{"optimize", config_path,
                                  json{{"verify", verify}, {"dump_lp", dump_lp_path}},
                                  {out_path}, elapsed_sec(start)};
        manifest.write();
    }
    if (!verified) {
        std::cerr << "verification failed; see the \"verification\" object\n";
        return kExitSolverFailure;
    }
    return kExitOk;
}

// ----------------------------------------------------------------- sweep --

int cmd_sweep(const std::string& spec_path, const std::string& out_path) {
    const auto start = std::chrono::steady_clock::now();
    const scenarios::SweepSpec spec = io::sweep_spec_from_json(io::parse_file(spec_path));
    const auto rows = scenarios::sweep(spec);
    emit(out_path, scenarios::to_csv(rows));
    if (!out_path.empty()) {
        cli::RunManifest manifest{"sweep", spec_path, json{{"rows", rows.size()}},
                                  {out_path}, elapsed_sec(start)};
        manifest.write();
    }
    return kExitOk;
}

// -------------------------------------------------------------- simulate --

uint64_t resolve_seed(const CLI::Option* seed_opt, uint64_t flag_seed, const io::SimJob& job) {
    if (seed_opt->count() > 0) return flag_seed;
    if (job.seed_in_file) return job.config.seed;
    if (const char* env = std::getenv("AEMOD_SEED")) return std::strtoull(env, nullptr, 10);
    return 0;
}

int cmd_simulate(const std::string& config_path, io::SimJob job, const std::string& out_path,
                 const std::string& csv_path, bool do_validate, double validate_tol) {
    const auto start = std::chrono::steady_clock::now();

    std::string policy_kind = "explicit";
    if (job.policy_kind.has_value()) {
        policy_kind = scenarios::to_string(*job.policy_kind);
        if (*job.policy_kind == scenarios::PolicyKind::optimal) {
            const lp::LpSolution solution = lp::optimize_policy(job.config.zone);
            if (solution.status != SolveStatus::optimal)
                return diagnose_infeasible(job.config.zone,
                                           "no policy attains a positive response-rate margin");
            job.config.policy = solution.policy;
        } else {
            job.config.policy =
                scenarios::make_policy(*job.policy_kind, job.config.zone.n_classes);
        }
    }

    const sim::SimReport report = sim::run(job.config);
    json out = io::to_json(report);
    out["policy"] = io::to_json(job.config.policy);
    out["policy_kind"] = policy_kind;

    std::vector<sim::ValidationRow> validation;
    bool all_pass = true;
    if (do_validate) {
        validation = sim::validate_against_formula(report, job.config.zone, job.config.policy,
                                                   validate_tol);
        json rows = json::array();
        for (const auto& row : validation) {
            all_pass = all_pass && row.pass;
            rows.push_back(json{{"class", row.cls},
                                {"empirical_mean_rt_min", row.empirical},
                                {"analytic_rt_min", row.analytic},
                                {"rel_err", row.rel_err},
                                {"pass", row.pass}});
        }
        out["validation"] = json{{"rel_tol", validate_tol}, {"rows", rows}, {"pass", all_pass}};
    }

    emit(out_path, out.dump(2) + "\n");
    if (!csv_path.empty())
        io::write_file_atomic(csv_path, io::sim_report_csv_header() + io::sim_report_csv_rows(report));

    std::vector<std::string> outputs;
    if (!out_path.empty()) outputs.push_back(out_path);
    if (!csv_path.empty()) outputs.push_back(csv_path);
    if (!outputs.empty()) {
        cli::RunManifest manifest{"simulate", config_path,
                                  json{{"mode", sim::to_string(job.config.mode)},
                                       {"horizon", job.config.horizon},
                                       {"warmup", job.config.warmup},
                                       {"seed", job.config.seed},
                                       {"policy_kind", policy_kind}},
                                  outputs, elapsed_sec(start)};
        manifest.write();
    }
    if (do_validate && !all_pass) {
        std::cerr << "simulation disagrees with the closed-form response times\n";
        return kExitSolverFailure;
    }
    return kExitOk;
}

// --------------------------------------------------------------- compare --

int cmd_compare(const std::string& config_path, const std::string& out_path) {
    const auto start = std::chrono::steady_clock::now();
    const ZoneConfig zone = io::zone_from_json(io::parse_file(config_path));

    lp::LpSolution solution;
    try {
        solution = lp::optimize_policy(zone);
    } catch (const InfeasibleError& e) {
        return diagnose_infeasible(zone, e.what());
    }
    if (solution.status != SolveStatus::optimal)
        return diagnose_infeasible(zone, "no policy attains a positive response-rate margin");

    struct Entry {
        std::string name;
        json eval;
    };
    std::vector<Entry> entries;
    entries.push_back({"optimal", evaluation_json(zone, solution.policy, "optimal")});
    for (auto kind : {scenarios::PolicyKind::always_charge, scenarios::PolicyKind::equal_split,
                      scenarios::PolicyKind::always_charge_literal}) {
        const std::string name = scenarios::to_string(kind);
        entries.push_back({name, evaluation_json(zone, scenarios::make_policy(kind, zone.n_classes), name)});
    }

    auto metric = [](const json& eval, const char* key) {
        return eval.at(key).is_number() ? eval.at(key).get<double>()
                                        : std::numeric_limits<double>::infinity();
    };
    const double opt_max = metric(entries[0].eval, "max_rt_min");
    const double opt_avg = metric(entries[0].eval, "avg_rt_min");

    json table = json::array();
    std::ostringstream text;
    text << "policy                  R*        max_rt_min  avg_rt_min  stable  gain_max%  gain_avg%\n";
    for (const auto& entry : entries) {
        const double max_rt = metric(entry.eval, "max_rt_min");
        const double avg_rt = metric(entry.eval, "avg_rt_min");
        json row{{"policy", entry.name},
                 {"r_star", entry.eval.at("r_star")},
                 {"max_rt_min", entry.eval.at("max_rt_min")},
                 {"avg_rt_min", entry.eval.at("avg_rt_min")},
                 {"stable", entry.eval.at("stable")}};
        char buf[256];
        if (entry.name == "optimal") {
            std::snprintf(buf, sizeof buf, "%-22s  %-8.5g  %-10.5g  %-10.5g  %-6d  %-9s  %-9s\n",
                          entry.name.c_str(), entry.eval.at("r_star").get<double>(), max_rt, avg_rt,
                          entry.eval.at("stable").get<bool>() ? 1 : 0, "-", "-");
        } else {
            // An unstable baseline against a finite optimum is an infinite gain.
            const double gain_max =
                std::isfinite(max_rt) ? 100.0 * (max_rt - opt_max) / max_rt
                                      : std::numeric_limits<double>::infinity();
            const double gain_avg =
                std::isfinite(avg_rt) ? 100.0 * (avg_rt - opt_avg) / avg_rt
                                      : std::numeric_limits<double>::infinity();
            row["gain_max_pct"] = std::isfinite(gain_max) ? json(gain_max) : json("inf");
            row["gain_avg_pct"] = std::isfinite(gain_avg) ? json(gain_avg) : json("inf");
            std::snprintf(buf, sizeof buf, "%-22s  %-8.5g  %-10.5g  %-10.5g  %-6d  %-9.4g  %-9.4g\n",
                          entry.name.c_str(), entry.eval.at("r_star").get<double>(), max_rt, avg_rt,
                          entry.eval.at("stable").get<bool>() ? 1 : 0, gain_max, gain_avg);
        }
        text << buf;
        table.push_back(row);
    }
    std::cout << text.str();

    if (!out_path.empty()) {
        io::write_file_atomic(out_path, json{{"zone", io::to_json(zone)}, {"table", table}}.dump(2) + "\n");
        cli::RunManifest manifest{"compare", config_path, json::object(), {out_path},
                                  elapsed_sec(start)};
        manifest.write();
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"single-zone electric mobility-on-demand planning toolkit"};
    app.set_version_flag("--version", aemod::cli::kToolVersion);
    app.require_subcommand(1);

    // nstar
    auto* nstar = app.add_subcommand("nstar", "class-count bound and smallest admissible count");
    std::string nstar_config;
    nstar->add_option("--config", nstar_config, "zone config JSON")->required();

    // optimize
    auto* optimize = app.add_subcommand("optimize", "solve or evaluate dispatch/charge policies");
    std::string opt_config, opt_policy, opt_policy_file, opt_out, opt_dump_lp;
    bool opt_verify = false;
    optimize->add_option("--config", opt_config, "zone config JSON")->required();
    optimize->add_option("--policy", opt_policy,
                         "evaluate a named policy instead of solving "
                         "(optimal|always_charge|always_charge_literal|equal_split)");
    optimize->add_option("--policy-file", opt_policy_file,
                         "evaluate the policy from a solution JSON");
    optimize->add_flag("--verify", opt_verify, "attach duality and KKT verification");
    optimize->add_option("--out", opt_out, "write the solution JSON here");
    optimize->add_option("--dump-lp", opt_dump_lp, "dump the constraint matrix JSON here");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "evaluate an experiment grid to CSV");
    std::string sweep_spec, sweep_out;
    sweep->add_option("--spec", sweep_spec, "sweep spec JSON")->required();
    sweep->add_option("--out", sweep_out, "output CSV path");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "discrete-event simulation of the zone");
    std::string sim_config, sim_mode, sim_policy, sim_out, sim_csv;
    double sim_horizon = -1.0, sim_warmup = -1.0, sim_validate_tol = 0.05;
    uint64_t sim_seed = 0;
    simulate->add_option("--config", sim_config, "simulation config JSON")->required();
    simulate->add_option("--mode", sim_mode, "abstract|physical");
    simulate->add_option("--horizon", sim_horizon, "simulated minutes");
    simulate->add_option("--warmup", sim_warmup, "minutes excluded from statistics");
    auto* seed_opt = simulate->add_option("--seed", sim_seed, "master RNG seed");
    simulate->add_option("--policy", sim_policy,
                         "override policy (optimal|always_charge|always_charge_literal|equal_split)");
    simulate->add_option("--out", sim_out, "write the report JSON here");
    simulate->add_option("--csv", sim_csv, "write per-class CSV rows here");
    auto* validate_opt = simulate->add_option(
        "--validate", sim_validate_tol,
        "check abstract-mode means against the closed form at this relative tolerance");
    validate_opt->expected(0, 1);

    // compare
    auto* compare = app.add_subcommand("compare", "optimal vs fixed baseline policies");
    std::string cmp_config, cmp_out;
    compare->add_option("--config", cmp_config, "zone config JSON")->required();
    compare->add_option("--out", cmp_out, "write the comparison JSON here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (nstar->parsed()) return cmd_nstar(nstar_config);
        if (optimize->parsed())
            return cmd_optimize(opt_config, opt_policy, opt_policy_file, opt_verify, opt_out,
                                opt_dump_lp);
        if (sweep->parsed()) return cmd_sweep(sweep_spec, sweep_out);
        if (simulate->parsed()) {
            aemod::io::SimJob job = aemod::io::sim_job_from_json(aemod::io::parse_file(sim_config));
            if (!sim_mode.empty()) {
                if (sim_mode == "abstract")
                    job.config.mode = aemod::sim::Mode::abstract;
                else if (sim_mode == "physical")
                    job.config.mode = aemod::sim::Mode::physical;
                else
                    throw aemod::ConfigError("mode must be \"abstract\" or \"physical\"");
            }
            if (sim_horizon > 0.0) {
                job.config.horizon = sim_horizon;
                if (sim_warmup < 0.0) job.config.warmup = sim_horizon * 0.1;
            }
            if (sim_warmup >= 0.0) job.config.warmup = sim_warmup;
            if (!sim_policy.empty())
                job.policy_kind = aemod::scenarios::policy_kind_from_string(sim_policy);
            job.config.seed = resolve_seed(seed_opt, sim_seed, job);
            return cmd_simulate(sim_config, std::move(job), sim_out, sim_csv,
                                validate_opt->count() > 0, sim_validate_tol);
        }
        if (compare->parsed()) return cmd_compare(cmp_config, cmp_out);
    } catch (const aemod::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const aemod::InfeasibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const aemod::SolverError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolverFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolverFailure;
    }
    return kExitUsage;
}
