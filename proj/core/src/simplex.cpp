#include "aemod/simplex.hpp"

#include <cassert>
#include <cmath>
#include <limits>

namespace aemod {

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        case SolveStatus::iteration_limit: return "iteration_limit";
    }
    return "unknown";
}

namespace {

// Working tableau: body rows hold [structural | aux | artificial | rhs],
// cost holds reduced costs with -objective in its rhs cell.
struct Tableau {
    std::vector<std::vector<double>> row;
    std::vector<double> cost;
    std::vector<int> basis;  // basis[r] = column basic in row r
    int n_struct = 0;
    int n_aux = 0;
    int art_begin = 0;  // first artificial column
    int n_cols = 0;     // columns excluding rhs
    double tol = 1e-9;

    double rhs(int r) const { return row[static_cast<size_t>(r)].back(); }

    void pivot(int r, int c) {
        auto& pr = row[static_cast<size_t>(r)];
        const double inv = 1.0 / pr[static_cast<size_t>(c)];
        for (auto& v : pr) v *= inv;
        pr[static_cast<size_t>(c)] = 1.0;  // kill residual round-off
        for (size_t i = 0; i < row.size(); ++i) {
            if (static_cast<int>(i) == r) continue;
            const double f = row[i][static_cast<size_t>(c)];
            if (f == 0.0) continue;
            for (size_t j = 0; j < pr.size(); ++j) row[i][j] -= f * pr[j];
            row[i][static_cast<size_t>(c)] = 0.0;
        }
        const double fc = cost[static_cast<size_t>(c)];
        if (fc != 0.0) {
            for (size_t j = 0; j < pr.size(); ++j) cost[j] -= fc * pr[j];
            cost[static_cast<size_t>(c)] = 0.0;
        }
        basis[static_cast<size_t>(r)] = c;
    }

    // Bland's rule: entering = lowest-index column with negative reduced
    // cost; leaving = min-ratio row, ties broken on the lowest basic
    // variable index. Returns the status of the current phase.
    SolveStatus iterate(int col_limit, int max_iters, int& iterations) {
        while (true) {
            int enter = -1;
            for (int j = 0; j < col_limit; ++j) {
                if (cost[static_cast<size_t>(j)] < -tol) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return SolveStatus::optimal;

            int leave = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (size_t r = 0; r < row.size(); ++r) {
                const double a = row[r][static_cast<size_t>(enter)];
                if (a <= tol) continue;
                const double ratio = rhs(static_cast<int>(r)) / a;
                if (ratio < best_ratio - 1e-12 ||
                    (std::abs(ratio - best_ratio) <= 1e-12 &&
                     (leave < 0 || basis[r] < basis[static_cast<size_t>(leave)]))) {
                    best_ratio = ratio;
                    leave = static_cast<int>(r);
                }
            }
            if (leave < 0) return SolveStatus::unbounded;

            pivot(leave, enter);
            if (++iterations > max_iters) return SolveStatus::iteration_limit;
        }
    }
};

}  // namespace

SimplexResult solve_simplex(const DenseMatrix& a_ub, const std::vector<double>& b_ub,
                            const DenseMatrix& a_eq, const std::vector<double>& b_eq,
                            const std::vector<double>& c, const SimplexOptions& opts) {
    const int nv = static_cast<int>(c.size());
    const int m_ub = a_ub.rows;
    const int m_eq = a_eq.rows;
    const int m = m_ub + m_eq;
    assert(a_ub.rows == 0 || a_ub.cols == nv);
    assert(a_eq.rows == 0 || a_eq.cols == nv);
    assert(static_cast<int>(b_ub.size()) == m_ub);
    assert(static_cast<int>(b_eq.size()) == m_eq);

    SimplexResult result;
    result.x.assign(static_cast<size_t>(nv), 0.0);
    result.ub_duals.assign(static_cast<size_t>(m_ub), 0.0);
    result.reduced_costs.assign(static_cast<size_t>(nv), 0.0);

    Tableau t;
    t.tol = opts.pivot_tol;
    t.n_struct = nv;
    t.n_aux = m_ub;
    t.art_begin = nv + m_ub;

    // Count artificials: one for every equality row and every inequality row
    // whose rhs is negative (those become surplus rows after negation).
    int n_art = m_eq;
    for (double b : b_ub)
        if (b < 0.0) ++n_art;
    t.n_cols = nv + m_ub + n_art;

    t.row.assign(static_cast<size_t>(m), std::vector<double>(static_cast<size_t>(t.n_cols) + 1, 0.0));
    t.basis.assign(static_cast<size_t>(m), -1);

    int next_art = t.art_begin;
    for (int r = 0; r < m_ub; ++r) {
        const double sign = b_ub[static_cast<size_t>(r)] < 0.0 ? -1.0 : 1.0;
        auto& row = t.row[static_cast<size_t>(r)];
        for (int j = 0; j < nv; ++j) row[static_cast<size_t>(j)] = sign * a_ub.at(r, j);
        row[static_cast<size_t>(nv + r)] = sign;  // slack (+1) or surplus (-1)
        row.back() = sign * b_ub[static_cast<size_t>(r)];
        if (sign > 0.0) {
            t.basis[static_cast<size_t>(r)] = nv + r;
        } else {
            row[static_cast<size_t>(next_art)] = 1.0;
            t.basis[static_cast<size_t>(r)] = next_art++;
        }
    }
    for (int r = 0; r < m_eq; ++r) {
        const double sign = b_eq[static_cast<size_t>(r)] < 0.0 ? -1.0 : 1.0;
        auto& row = t.row[static_cast<size_t>(m_ub + r)];
        for (int j = 0; j < nv; ++j) row[static_cast<size_t>(j)] = sign * a_eq.at(r, j);
        row.back() = sign * b_eq[static_cast<size_t>(r)];
        row[static_cast<size_t>(next_art)] = 1.0;
        t.basis[static_cast<size_t>(m_ub + r)] = next_art++;
    }
    assert(next_art == t.n_cols);

    const int max_iters = opts.iteration_factor * (m + t.n_cols);

    // Phase 1: minimize the artificial sum.
    t.cost.assign(static_cast<size_t>(t.n_cols) + 1, 0.0);
    if (n_art > 0) {
        for (int r = 0; r < m; ++r) {
            if (t.basis[static_cast<size_t>(r)] < t.art_begin) continue;
            const auto& row = t.row[static_cast<size_t>(r)];
            for (size_t j = 0; j < row.size(); ++j) t.cost[j] -= row[j];
        }
        for (int j = t.art_begin; j < t.n_cols; ++j) t.cost[static_cast<size_t>(j)] = 0.0;

        const SolveStatus st = t.iterate(t.art_begin, max_iters, result.iterations);
        if (st == SolveStatus::iteration_limit) {
            result.status = st;
            return result;
        }
        const double phase1_obj = -t.cost.back();
        if (phase1_obj > 1e-7) {
            result.status = SolveStatus::infeasible;
            return result;
        }
        // Pivot surviving artificials out of the basis; rows where no
        // structural or aux column remains are redundant and get dropped.
        for (int r = static_cast<int>(t.row.size()) - 1; r >= 0; --r) {
            if (t.basis[static_cast<size_t>(r)] < t.art_begin) continue;
            int col = -1;
            for (int j = 0; j < t.art_begin; ++j) {
                if (std::abs(t.row[static_cast<size_t>(r)][static_cast<size_t>(j)]) > t.tol) {
                    col = j;
                    break;
                }
            }
            if (col >= 0) {
                t.pivot(r, col);
            } else {
                t.row.erase(t.row.begin() + r);
                t.basis.erase(t.basis.begin() + r);
            }
        }
    }

    // Phase 2: the real objective, with artificial columns frozen out.
    for (size_t j = 0; j < t.cost.size(); ++j) t.cost[j] = 0.0;
    for (int j = 0; j < nv; ++j) t.cost[static_cast<size_t>(j)] = c[static_cast<size_t>(j)];
    for (size_t r = 0; r < t.row.size(); ++r) {
        const int b = t.basis[r];
        if (b >= nv) continue;
        const double cb = c[static_cast<size_t>(b)];
        if (cb == 0.0) continue;
        for (size_t j = 0; j < t.cost.size(); ++j) t.cost[j] -= cb * t.row[r][j];
    }

    const SolveStatus st = t.iterate(t.art_begin, max_iters, result.iterations);
    if (st != SolveStatus::optimal) {
        result.status = st;
        return result;
    }

    for (size_t r = 0; r < t.row.size(); ++r) {
        const int b = t.basis[r];
        if (b < nv) result.x[static_cast<size_t>(b)] = t.rhs(static_cast<int>(r));
    }
    result.objective = -t.cost.back();
    // Multiplier of inequality row i is the reduced cost of its aux column;
    // multiplier of x_j >= 0 is the reduced cost of x_j.
    for (int i = 0; i < m_ub; ++i) result.ub_duals[static_cast<size_t>(i)] = t.cost[static_cast<size_t>(nv + i)];
    for (int j = 0; j < nv; ++j) result.reduced_costs[static_cast<size_t>(j)] = t.cost[static_cast<size_t>(j)];
    result.status = SolveStatus::optimal;
    return result;
}

}  // namespace aemod
