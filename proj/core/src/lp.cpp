#include "aemod/lp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include "aemod/stability.hpp"

namespace aemod {
namespace lp {

const char* to_string(RowKind kind) {
    switch (kind) {
        case RowKind::customer_queue: return "customer_queue";
        case RowKind::partial_pool: return "partial_pool";
        case RowKind::full_station: return "full_station";
        case RowKind::upper_bound: return "upper_bound";
        case RowKind::r_unbounded: return "r_unbounded";
        case RowKind::lower_bound: return "lower_bound";
        case RowKind::r_positivity: return "r_positivity";
    }
    return "unknown";
}

namespace {

double pool_capacity(const ZoneConfig& config) {
    return static_cast<double>(config.c_points) * static_cast<double>(config.n_classes) *
           config.mu_c;
}

// Margin of class i (1..n): supply rate minus customer arrival rate.
void class_margins(const ZoneConfig& config, const std::vector<double>& q,
                   std::vector<double>& out) {
    const int n = config.n_classes;
    const double lv = config.lambda_v;
    const auto& p = config.p;
    out.resize(static_cast<size_t>(n));
    for (int i = 1; i < n; ++i) {
        out[static_cast<size_t>(i - 1)] =
            lv * (p[static_cast<size_t>(i - 1)] * (1.0 - q[static_cast<size_t>(i - 1)]) +
                  p[static_cast<size_t>(i)] * q[static_cast<size_t>(i)]) -
            config.lambda_c[static_cast<size_t>(i - 1)];
    }
    out[static_cast<size_t>(n - 1)] =
        lv * (p[static_cast<size_t>(n - 1)] * (1.0 - q[static_cast<size_t>(n - 1)]) + p[0] * q[0]) -
        config.lambda_c[static_cast<size_t>(n - 1)];
}

bool charging_feasible(const ZoneConfig& config, const std::vector<double>& q) {
    double partial = 0.0;
    for (int i = 0; i < config.n_classes; ++i)
        partial += config.lambda_v * config.p[static_cast<size_t>(i)] *
                   (1.0 - q[static_cast<size_t>(i)]);
    const double full = config.lambda_v * config.p[0] * q[0];
    return partial <= pool_capacity(config) * (1.0 - kStrictRelMargin) &&
           full <= config.mu_c * (1.0 - kStrictRelMargin);
}

uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

LpProblem build_problem(const ZoneConfig& config) {
    config.validate();
    const int n = config.n_classes;
    if (n > 64) throw ConfigError("n_classes above 64 is outside the supported regime");
    if (!stability::demand_within_inflow(config)) {
        std::ostringstream os;
        os.precision(6);
        os << "infeasible demand: total arrival rate of the customers (" << config.total_demand()
           << "/min) must be strictly less than the total arrival rate of the vehicles ("
           << config.lambda_v << "/min)";
        throw InfeasibleError(os.str());
    }

    const double lv = config.lambda_v;
    const auto& p = config.p;

    LpProblem prob;
    prob.n = n;
    prob.a = DenseMatrix(3 * n + 3, n + 1);
    prob.b.assign(static_cast<size_t>(3 * n + 3), 0.0);
    prob.c.assign(static_cast<size_t>(n + 1), 0.0);
    prob.c.back() = -1.0;  // maximize R
    prob.row_kind.resize(static_cast<size_t>(3 * n + 3));

    // Customer rows: lv*(p_{i-1} q_{i-1} - p_i q_i) + R <= lv p_{i-1} - lc_i,
    // with the last row wrapping around to couple q_{n-1} and q_0.
    for (int i = 1; i < n; ++i) {
        const int r = i - 1;
        prob.a.at(r, i - 1) = lv * p[static_cast<size_t>(i - 1)];
        prob.a.at(r, i) = -lv * p[static_cast<size_t>(i)];
        prob.a.at(r, n) = 1.0;
        prob.b[static_cast<size_t>(r)] =
            lv * p[static_cast<size_t>(i - 1)] - config.lambda_c[static_cast<size_t>(i - 1)];
        prob.row_kind[static_cast<size_t>(r)] = {RowKind::customer_queue, i};
    }
    {
        const int r = n - 1;
        prob.a.at(r, n - 1) = lv * p[static_cast<size_t>(n - 1)];
        prob.a.at(r, 0) += -lv * p[0];
        prob.a.at(r, n) = 1.0;
        prob.b[static_cast<size_t>(r)] =
            lv * p[static_cast<size_t>(n - 1)] - config.lambda_c[static_cast<size_t>(n - 1)];
        prob.row_kind[static_cast<size_t>(r)] = {RowKind::customer_queue, n};
    }
    // Charging rows, tightened since the model wants them strict.
    {
        const int r = n;
        for (int j = 0; j < n; ++j) prob.a.at(r, j) = -lv * p[static_cast<size_t>(j)];
        prob.b[static_cast<size_t>(r)] = pool_capacity(config) * (1.0 - kStrictRelMargin) - lv;
        prob.row_kind[static_cast<size_t>(r)] = {RowKind::partial_pool, -1};

        prob.a.at(r + 1, 0) = lv * p[0];
        prob.b[static_cast<size_t>(r) + 1] = config.mu_c * (1.0 - kStrictRelMargin);
        prob.row_kind[static_cast<size_t>(r) + 1] = {RowKind::full_station, -1};
    }
    // Decision box: q_j <= 1 rows, then q_j >= 0 rows, then R >= 0.
    for (int j = 0; j < n; ++j) {
        const int r = n + 2 + j;
        prob.a.at(r, j) = 1.0;
        prob.b[static_cast<size_t>(r)] = 1.0;
        prob.row_kind[static_cast<size_t>(r)] = {RowKind::upper_bound, j};
    }
    for (int j = 0; j < n; ++j) {
        const int r = 2 * n + 2 + j;
        prob.a.at(r, j) = -1.0;
        prob.b[static_cast<size_t>(r)] = 0.0;
        prob.row_kind[static_cast<size_t>(r)] = {RowKind::lower_bound, j};
    }
    {
        const int r = 3 * n + 2;
        prob.a.at(r, n) = -1.0;
        prob.b[static_cast<size_t>(r)] = 0.0;
        prob.row_kind[static_cast<size_t>(r)] = {RowKind::r_positivity, -1};
    }
    return prob;
}

LpSolution solve_primal(const LpProblem& problem) {
    const int n = problem.n;
    // The lower-bound and R-positivity rows are exactly the solver's native
    // x >= 0 bounds, so only the first 2n+2 rows enter the tableau; their
    // multipliers are recovered from the reduced costs.
    const int m = 2 * n + 2;
    DenseMatrix a_ub(m, n + 1);
    std::vector<double> b_ub(static_cast<size_t>(m));
    for (int r = 0; r < m; ++r) {
        for (int j = 0; j <= n; ++j) a_ub.at(r, j) = problem.a.at(r, j);
        b_ub[static_cast<size_t>(r)] = problem.b[static_cast<size_t>(r)];
    }

    const SimplexResult res = solve_simplex(a_ub, b_ub, {}, {}, problem.c);
    if (res.status == SolveStatus::iteration_limit)
        throw SolverError("simplex iteration cap exceeded while solving the zone program");

    LpSolution sol;
    sol.iterations = res.iterations;
    if (res.status != SolveStatus::optimal) {
        sol.status = res.status;
        return sol;
    }

    sol.policy.q.assign(res.x.begin(), res.x.begin() + n);
    for (auto& qi : sol.policy.q) qi = std::clamp(qi, 0.0, 1.0);
    sol.r_star = res.x[static_cast<size_t>(n)];
    // R > 0 is required; an attainable optimum of zero means the strict
    // program is infeasible.
    sol.status = sol.r_star > 0.0 ? SolveStatus::optimal : SolveStatus::infeasible;

    sol.duals.alpha.assign(res.ub_duals.begin(), res.ub_duals.begin() + n);
    sol.duals.beta = {res.ub_duals[static_cast<size_t>(n)], res.ub_duals[static_cast<size_t>(n) + 1]};
    sol.duals.gamma.assign(res.ub_duals.begin() + n + 2, res.ub_duals.begin() + 2 * n + 2);
    sol.duals.omega.assign(res.reduced_costs.begin(), res.reduced_costs.end());
    return sol;
}

DualSolution solve_dual(const LpProblem& problem) {
    const int n = problem.n;
    const int rows = problem.materialized_rows();
    const int cols = problem.cols();

    // minimize b'nu  s.t.  A'nu = -c,  nu >= 0
    DenseMatrix a_eq(cols, rows);
    for (int r = 0; r < rows; ++r)
        for (int j = 0; j < cols; ++j) a_eq.at(j, r) = problem.a.at(r, j);
    std::vector<double> b_eq(static_cast<size_t>(cols), 0.0);
    for (int j = 0; j < cols; ++j) b_eq[static_cast<size_t>(j)] = -problem.c[static_cast<size_t>(j)];

    const SimplexResult res = solve_simplex({}, {}, a_eq, b_eq, problem.b);
    if (res.status == SolveStatus::iteration_limit)
        throw SolverError("simplex iteration cap exceeded while solving the dual program");

    DualSolution dual;
    dual.status = res.status;
    dual.iterations = res.iterations;
    if (res.status != SolveStatus::optimal) return dual;

    dual.r_star = res.objective;
    dual.nu.alpha.assign(res.x.begin(), res.x.begin() + n);
    dual.nu.beta = {res.x[static_cast<size_t>(n)], res.x[static_cast<size_t>(n) + 1]};
    dual.nu.gamma.assign(res.x.begin() + n + 2, res.x.begin() + 2 * n + 2);
    dual.nu.omega.assign(res.x.begin() + 2 * n + 2, res.x.end());
    return dual;
}

double dual_rate_estimate(const ZoneConfig& config, const DualVector& duals) {
    const int n = config.n_classes;
    double value = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double rhs = config.lambda_v * config.p[static_cast<size_t>(i - 1)] -
                           config.lambda_c[static_cast<size_t>(i - 1)];
        value += rhs * duals.alpha[static_cast<size_t>(i - 1)];
    }
    for (double g : duals.gamma) value += g;
    return value;
}

namespace {

struct KktContext {
    const ZoneConfig& config;
    const LpSolution& sol;
    double alpha_tol;
    double q_tol;
    KktReport& report;

    double margin(int cls) const {  // supply minus demand of class cls at q*
        std::vector<double> m;
        class_margins(config, sol.policy.q, m);
        return m[static_cast<size_t>(cls - 1)];
    }

    void violation(const std::string& msg) {
        report.violations.push_back(msg);
    }
};

// Tie branch for the decision pair (row_lo, row_hi): both rows must hold
// with equality at the optimum. row == 0 encodes "not applicable".
bool rows_active(KktContext& ctx, int row_lo, int row_hi, int decision) {
    const double scale = std::max(1.0, ctx.config.lambda_v);
    bool ok = true;
    for (int row : {row_lo, row_hi}) {
        const double resid = ctx.margin(row) - ctx.sol.r_star;
        if (std::abs(resid) > ctx.q_tol * scale) {
            std::ostringstream os;
            os << "decision q_" << decision << ": tied multipliers but class " << row
               << " margin is off its bound by " << resid;
            ctx.violation(os.str());
            ok = false;
        }
    }
    return ok;
}

}  // namespace

KktReport verify_kkt(const ZoneConfig& config, const LpSolution& solution, double alpha_tol,
                     double q_tol) {
    const int n = config.n_classes;
    KktReport report;
    KktContext ctx{config, solution, alpha_tol, q_tol, report};
    const auto& q = solution.policy.q;
    const auto& duals = solution.duals;

    bool any_degenerate = false;

    for (int d = 0; d < n; ++d) {
        KktDecisionCheck check;
        check.decision = d;
        check.q_observed = q[static_cast<size_t>(d)];
        // Raising q_d feeds class d (class n when d = 0) and starves class
        // d+1 (class 1 when d = 0), so the steering pair is:
        const int cls_up = d == 0 ? n : d;      // benefits from q_d = 1
        const int cls_down = d == 0 ? 1 : d + 1;  // benefits from q_d = 0
        const double a_up = duals.alpha[static_cast<size_t>(cls_up - 1)];
        const double a_down = duals.alpha[static_cast<size_t>(cls_down - 1)];
        check.alpha_up = a_up;
        check.alpha_down = a_down;

        if (a_down > a_up + alpha_tol) {
            check.kind = KktCase::pinned_zero;
            check.q_expected = 0.0;
        } else if (a_down < a_up - alpha_tol) {
            check.kind = KktCase::pinned_one;
            check.q_expected = 1.0;
        } else if (a_up <= alpha_tol && a_down <= alpha_tol) {
            check.kind = KktCase::tie_inactive;
            check.note = "both multipliers vanish; decision unconstrained by this pair";
            any_degenerate = true;
        } else {
            // Tie with mass: both steering rows are active.
            const int row_lo = d == 0 ? 1 : d;
            const int row_hi = d == 0 ? n : d + 1;
            check.kind = KktCase::interior;
            check.ok = rows_active(ctx, row_lo, row_hi, d);
            if (d >= 1) {
                if (config.p[static_cast<size_t>(d)] > 0.0) {
                    // Closed-form value implied by the activity of row d.
                    const double lv = config.lambda_v;
                    const double pred =
                        (solution.r_star + config.lambda_c[static_cast<size_t>(d - 1)] -
                         lv * config.p[static_cast<size_t>(d - 1)] *
                             (1.0 - q[static_cast<size_t>(d - 1)])) /
                        (lv * config.p[static_cast<size_t>(d)]);
                    check.q_expected = pred;
                    if (std::abs(check.q_observed - pred) > q_tol * std::max(1.0, std::abs(pred))) {
                        check.ok = false;
                        std::ostringstream os;
                        os << "decision q_" << d << ": interior value " << check.q_observed
                           << " does not match the active-row prediction " << pred;
                        ctx.violation(os.str());
                    }
                } else {
                    check.kind = KktCase::zero_probability;
                    check.note = "p of this class is zero; interior expression undefined";
                    any_degenerate = true;
                }
            }
        }

        if (check.q_expected.has_value() && check.kind != KktCase::interior &&
            check.kind != KktCase::zero_probability) {
            if (std::abs(check.q_observed - *check.q_expected) > q_tol) {
                check.ok = false;
                std::ostringstream os;
                os << "decision q_" << d << ": multipliers pin it to " << *check.q_expected
                   << " but the solver returned " << check.q_observed;
                ctx.violation(os.str());
            }
        }
        report.decisions.push_back(std::move(check));
    }

    // Stationarity in R: the customer multipliers carry unit mass.
    double alpha_sum = 0.0;
    for (double a : duals.alpha) alpha_sum += a;
    report.stationarity_ok = std::abs(alpha_sum - 1.0) <= std::max(alpha_tol, 1e-7);
    if (!report.stationarity_ok) {
        std::ostringstream os;
        os << "customer multipliers sum to " << alpha_sum << ", expected 1";
        ctx.violation(os.str());
    }

    // Slack charging rows and a positive R* must carry zero multipliers.
    const double mult_tol = std::max(alpha_tol, 1e-9);
    report.charging_duals_zero =
        std::abs(duals.beta[0]) <= mult_tol && std::abs(duals.beta[1]) <= mult_tol;
    if (!report.charging_duals_zero) {
        std::ostringstream os;
        os << "charging multipliers are (" << duals.beta[0] << ", " << duals.beta[1]
           << "); a binding charging row is outside the slack-capacity regime";
        ctx.violation(os.str());
    }
    report.r_lower_dual_zero = std::abs(duals.omega.back()) <= mult_tol;
    if (!report.r_lower_dual_zero)
        ctx.violation("the multiplier of R >= 0 is nonzero at a positive optimum");

    // Complementary slackness over every materialized row.
    const LpProblem problem = build_problem(config);
    std::vector<double> x(q.begin(), q.end());
    x.push_back(solution.r_star);
    std::vector<double> nu(static_cast<size_t>(problem.materialized_rows()), 0.0);
    for (int i = 0; i < n; ++i) {
        nu[static_cast<size_t>(i)] = duals.alpha[static_cast<size_t>(i)];
        nu[static_cast<size_t>(n + 2 + i)] = duals.gamma[static_cast<size_t>(i)];
        nu[static_cast<size_t>(2 * n + 2 + i)] = duals.omega[static_cast<size_t>(i)];
    }
    nu[static_cast<size_t>(n)] = duals.beta[0];
    nu[static_cast<size_t>(n) + 1] = duals.beta[1];
    nu[static_cast<size_t>(3 * n) + 2] = duals.omega.back();

    report.complementary_ok = true;
    const double cs_tol = 1e-6 * std::max(1.0, config.lambda_v);
    for (int r = 0; r < problem.materialized_rows(); ++r) {
        double ax = 0.0;
        for (int j = 0; j <= n; ++j) ax += problem.a.at(r, j) * x[static_cast<size_t>(j)];
        const double slack = problem.b[static_cast<size_t>(r)] - ax;
        if (slack < -cs_tol) {
            report.complementary_ok = false;
            std::ostringstream os;
            os << "row " << r << " (" << to_string(problem.row_kind[static_cast<size_t>(r)].kind)
               << ") violated by " << -slack;
            ctx.violation(os.str());
        }
        if (std::abs(slack * nu[static_cast<size_t>(r)]) > cs_tol) {
            report.complementary_ok = false;
            std::ostringstream os;
            os << "row " << r << " (" << to_string(problem.row_kind[static_cast<size_t>(r)].kind)
               << "): multiplier " << nu[static_cast<size_t>(r)] << " on slack " << slack;
            ctx.violation(os.str());
        }
    }

    bool any_fail = !report.violations.empty();
    for (const auto& check : report.decisions) any_fail = any_fail || !check.ok;
    report.overall = any_fail          ? KktReport::Overall::fail
                     : any_degenerate ? KktReport::Overall::degenerate
                                      : KktReport::Overall::pass;
    return report;
}

namespace {

GridSearchResult search_points(const ZoneConfig& config,
                               const std::function<bool(std::vector<double>&)>& next_point,
                               bool exhaustive) {
    GridSearchResult result;
    result.exhaustive = exhaustive;
    const int n = config.n_classes;
    std::vector<double> q(static_cast<size_t>(n), 0.0);
    std::vector<double> margins;
    double best = -std::numeric_limits<double>::infinity();
    while (next_point(q)) {
        ++result.points_evaluated;
        if (!charging_feasible(config, q)) continue;
        ++result.points_feasible;
        class_margins(config, q, margins);
        const double rate = *std::min_element(margins.begin(), margins.end());
        if (rate > best) {
            best = rate;
            result.best.q = q;
        }
    }
    if (result.points_feasible > 0) {
        result.best_rate = best;
        result.found = best > 0.0;
    }
    return result;
}

}  // namespace

GridSearchResult grid_search(const ZoneConfig& config, double step) {
    config.validate();
    if (config.n_classes > 5)
        throw ConfigError("exhaustive grid search supports n_classes <= 5; use random_search");
    if (!(step > 0.0)) throw ConfigError("grid step must be > 0");

    const int n = config.n_classes;
    // Grid spacing never coarser than requested: snap 1/step to an integer
    // when it is one up to round-off, otherwise take the next level up.
    const double inv = 1.0 / step;
    long long m = std::llround(inv);
    if (std::abs(inv - static_cast<double>(m)) > 1e-9 * std::max(1.0, inv))
        m = static_cast<long long>(std::ceil(inv));
    const int levels = static_cast<int>(std::max<long long>(1, m)) + 1;
    std::vector<int> idx(static_cast<size_t>(n), 0);
    bool first = true;
    bool done = false;
    auto next = [&](std::vector<double>& q) {
        if (done) return false;
        if (!first) {
            int d = 0;
            while (d < n) {
                if (++idx[static_cast<size_t>(d)] < levels) break;
                idx[static_cast<size_t>(d)] = 0;
                ++d;
            }
            if (d == n) {
                done = true;
                return false;
            }
        }
        first = false;
        for (int j = 0; j < n; ++j)
            q[static_cast<size_t>(j)] =
                std::min(1.0, static_cast<double>(idx[static_cast<size_t>(j)]) /
                                  static_cast<double>(levels - 1));
        return true;
    };
    return search_points(config, next, /*exhaustive=*/true);
}

GridSearchResult random_search(const ZoneConfig& config, long long samples, uint64_t seed) {
    config.validate();
    uint64_t state = seed;
    std::mt19937_64 rng(splitmix64(state));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    long long remaining = samples;
    auto next = [&](std::vector<double>& q) {
        if (remaining-- <= 0) return false;
        for (auto& qi : q) qi = unif(rng);
        return true;
    };
    return search_points(config, next, /*exhaustive=*/false);
}

LpSolution optimize_policy(const ZoneConfig& config) {
    const LpProblem problem = build_problem(config);
    LpSolution sol = solve_primal(problem);
    if (sol.status != SolveStatus::optimal) return sol;

    const DualSolution dual = solve_dual(problem);
    if (dual.status != SolveStatus::optimal)
        throw SolverError("dual program failed to solve although the primal is optimal");
    const double gap = std::abs(sol.r_star - dual.r_star);
    if (gap > 1e-6 * std::max(1.0, sol.r_star)) {
        std::ostringstream os;
        os.precision(12);
        os << "primal/dual rate mismatch: " << sol.r_star << " vs " << dual.r_star;
        throw SolverError(os.str());
    }
    sol.duals = dual.nu;
    sol.duals_cross_checked = true;
    sol.dual_r_star = dual.r_star;
    sol.iterations += dual.iterations;
    return sol;
}

}  // namespace lp
}  // namespace aemod
