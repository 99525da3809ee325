#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aemod/model.hpp"
#include "aemod/simplex.hpp"

namespace aemod {
namespace lp {

/// Which model constraint a materialized row encodes.
enum class RowKind {
    customer_queue,  // response-rate margin of one customer class
    partial_pool,    // load on the C distributed charging points
    full_station,    // load on the central full-charging station
    upper_bound,     // q_i <= 1
    r_unbounded,     // R's infinite upper bound; never materialized
    lower_bound,     // q_i >= 0
    r_positivity,    // R >= 0
};

const char* to_string(RowKind kind);

struct RowTag {
    RowKind kind;
    int index;  // customer class (1..n) or decision index (0..n-1); -1 otherwise
};

/// The zone program in inequality form: minimize c'x with A x <= b over
/// x = (q_0..q_{n-1}, R). Of the 3n+4 nominal rows, the infinite upper
/// bound on R is dropped, leaving 3n+3 materialized rows in the order:
/// n customer rows, partial pool, full station, n upper bounds, n lower
/// bounds, R positivity.
struct LpProblem {
    int n = 0;
    DenseMatrix a;
    std::vector<double> b;
    std::vector<double> c;
    std::vector<RowTag> row_kind;

    int nominal_rows() const { return 3 * n + 4; }
    int materialized_rows() const { return 3 * n + 3; }
    int cols() const { return n + 1; }
};

/// Strict inequalities (charging loads, R > 0) are tightened to
/// "<= threshold * (1 - kStrictRelMargin)" so the open feasible set gets a
/// declared closed margin. A zero threshold (R > 0) tightens to R >= 0;
/// strictness there is enforced by the optimal-status rule instead.
inline constexpr double kStrictRelMargin = 1e-6;

/// Multipliers in the layout of the inequality rows.
struct DualVector {
    std::vector<double> alpha;      // customer rows, classes 1..n
    std::array<double, 2> beta{};   // {partial pool, full station}
    std::vector<double> gamma;      // upper bounds on q_0..q_{n-1}
    std::vector<double> omega;      // lower bounds on q_0..q_{n-1}, then R
};

struct LpSolution {
    Policy policy;            // q*
    double r_star = 0.0;      // optimal minimum response-rate margin, 1/min
    SolveStatus status = SolveStatus::infeasible;
    int iterations = 0;
    DualVector duals;         // basis duals from solve_primal; replaced by the
                              // independent dual solve in optimize_policy
    bool duals_cross_checked = false;
    double dual_r_star = 0.0;  // rate recovered from the dual program, when solved
};

struct DualSolution {
    DualVector nu;
    double r_star = 0.0;  // b'nu; matches the primal optimum under strong duality
    SolveStatus status = SolveStatus::infeasible;
    int iterations = 0;
};

/// Build the inequality form for a zone. Requires n_classes in [2, 64] and
/// total customer demand strictly below lambda_v (otherwise no policy can
/// stabilize every class and an InfeasibleError is thrown).
LpProblem build_problem(const ZoneConfig& config);

/// Solve the program. Status is optimal only when the solver finishes at a
/// vertex with R* > 0; an attainable optimum of exactly zero means the open
/// constraint R > 0 is unattainable and reports infeasible. Duals come from
/// the final basis. Iteration-cap overruns throw SolverError.
LpSolution solve_primal(const LpProblem& problem);

/// Independently solve the dual program: minimize b'nu subject to
/// A'nu = -c, nu >= 0. Provides a second route to the optimal rate that
/// shares no tableau with solve_primal.
DualSolution solve_dual(const LpProblem& problem);

/// Optimal rate recovered from customer-row and upper-bound multipliers
/// alone: sum_i (lambda_v p_{i-1} - lambda_c_i) alpha_i + sum_i gamma_i.
/// Equals R* whenever the charging rows are slack at the optimum.
double dual_rate_estimate(const ZoneConfig& config, const DualVector& duals);

enum class KktCase {
    pinned_zero,       // alpha ordering pins q to 0
    pinned_one,        // alpha ordering pins q to 1
    interior,          // alpha tie with active rows; closed-form q prediction
    tie_inactive,      // alpha tie at zero: no case applies (degenerate)
    zero_probability,  // p_i = 0 guard: interior formula undefined (vacuous)
};

struct KktDecisionCheck {
    int decision = 0;  // q index, 0..n-1
    KktCase kind = KktCase::tie_inactive;
    bool ok = true;
    double alpha_up = 0.0;    // multiplier of the class fed by raising q
    double alpha_down = 0.0;  // multiplier of the class fed by lowering q
    double q_observed = 0.0;
    std::optional<double> q_expected;
    std::string note;
};

struct KktReport {
    std::vector<KktDecisionCheck> decisions;
    bool stationarity_ok = false;       // sum(alpha) = 1
    bool complementary_ok = false;      // per-row slack * multiplier ~ 0
    bool charging_duals_zero = false;   // both charging multipliers ~ 0
    bool r_lower_dual_zero = false;     // multiplier of R >= 0 is ~ 0
    enum class Overall { pass, degenerate, fail } overall = Overall::fail;
    std::vector<std::string> violations;
    bool passed() const { return overall == Overall::pass; }
};

/// Check the three-case structure of the optimal decisions against the
/// multipliers: a strictly larger upstream multiplier pins the decision to
/// 0, a strictly smaller one to 1, and ties with active rows must satisfy
/// the closed-form interior expressions. Ties at zero multipliers and
/// zero-probability classes are reported as degenerate/vacuous rather than
/// failed. Also audits complementary slackness, sum(alpha) = 1, and that
/// the charging and R-bound multipliers vanish.
KktReport verify_kkt(const ZoneConfig& config, const LpSolution& solution,
                     double alpha_tol = 1e-7, double q_tol = 1e-6);

struct GridSearchResult {
    bool found = false;      // a charging-feasible point with positive margin exists
    Policy best;
    double best_rate = 0.0;  // min class margin at the best point
    long long points_evaluated = 0;
    long long points_feasible = 0;
    bool exhaustive = false;
};

/// Brute-force oracle: evaluate the min-margin objective on the regular
/// grid {0, step, 2 step, ..., 1}^n, keeping only points that satisfy the
/// tightened charging constraints. Exhaustive mode requires n <= 5.
GridSearchResult grid_search(const ZoneConfig& config, double step);

/// Random-search fallback for larger n: a seeded uniform sample of the
/// policy box. Only a lower bound on the optimum.
GridSearchResult random_search(const ZoneConfig& config, long long samples, uint64_t seed);

/// build + primal + independent dual solve. On an optimal solve the duals
/// in the returned solution come from the dual program, and the primal and
/// dual rates must agree within 1e-6 * max(1, R*) or a SolverError is
/// thrown.
LpSolution optimize_policy(const ZoneConfig& config);

}  // namespace lp
}  // namespace aemod
