#pragma once

#include <cstddef>
#include <vector>

namespace aemod {

/// Row-major dense matrix, sized for problems with a few dozen rows.
struct DenseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    DenseMatrix() = default;
    DenseMatrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * static_cast<size_t>(c), 0.0) {}

    double& at(int r, int c) { return data[static_cast<size_t>(r) * static_cast<size_t>(cols) + static_cast<size_t>(c)]; }
    double at(int r, int c) const { return data[static_cast<size_t>(r) * static_cast<size_t>(cols) + static_cast<size_t>(c)]; }
};

enum class SolveStatus { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(SolveStatus status);

struct SimplexOptions {
    double pivot_tol = 1e-9;
    int iteration_factor = 50;  // cap = factor * (rows + cols)
};

struct SimplexResult {
    SolveStatus status = SolveStatus::infeasible;
    std::vector<double> x;              // structural variables at the final vertex
    double objective = 0.0;             // c'x
    std::vector<double> ub_duals;       // one multiplier >= 0 per inequality row
    std::vector<double> reduced_costs;  // per structural variable, at optimum
    int iterations = 0;
};

/// Minimize c'x subject to a_ub x <= b_ub, a_eq x = b_eq, x >= 0.
///
/// Dense two-phase tableau with Bland's anti-cycling rule, so every solve is
/// deterministic and guaranteed to terminate. ub_duals follow the Lagrangian
/// sign convention (L = c'x + nu'(Ax - b), nu >= 0); reduced_costs are the
/// multipliers of the x >= 0 bounds. Duals for equality rows are not
/// reported.
SimplexResult solve_simplex(const DenseMatrix& a_ub, const std::vector<double>& b_ub,
                            const DenseMatrix& a_eq, const std::vector<double>& b_eq,
                            const std::vector<double>& c, const SimplexOptions& opts = {});

}  // namespace aemod
