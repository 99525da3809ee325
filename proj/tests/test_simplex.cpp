#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "aemod/simplex.hpp"

using namespace aemod;

namespace {

DenseMatrix matrix(int rows, int cols, std::initializer_list<double> values) {
    DenseMatrix m(rows, cols);
    auto it = values.begin();
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m.at(r, c) = *it++;
    return m;
}

}  // namespace

TEST_CASE("basic maximization over a simplex facet") {
    // min -x - y  s.t.  x + y <= 1
    const auto a = matrix(1, 2, {1.0, 1.0});
    const auto res = solve_simplex(a, {1.0}, {}, {}, {-1.0, -1.0});
    REQUIRE(res.status == SolveStatus::optimal);
    CHECK(res.objective == doctest::Approx(-1.0));
    CHECK(res.x[0] + res.x[1] == doctest::Approx(1.0));
    CHECK(res.ub_duals[0] == doctest::Approx(1.0));
}

TEST_CASE("infeasible and unbounded programs are detected") {
    const auto a = matrix(1, 1, {1.0});
    CHECK(solve_simplex(a, {-1.0}, {}, {}, {1.0}).status == SolveStatus::infeasible);

    const auto a2 = matrix(1, 1, {-1.0});
    CHECK(solve_simplex(a2, {1.0}, {}, {}, {-1.0}).status == SolveStatus::unbounded);
}

TEST_CASE("equality constraints go through phase one") {
    // min x + y  s.t.  x + y = 2, x <= 3
    const auto a_ub = matrix(1, 2, {1.0, 0.0});
    const auto a_eq = matrix(1, 2, {1.0, 1.0});
    const auto res = solve_simplex(a_ub, {3.0}, a_eq, {2.0}, {1.0, 1.0});
    REQUIRE(res.status == SolveStatus::optimal);
    CHECK(res.objective == doctest::Approx(2.0));
    CHECK(res.x[0] + res.x[1] == doctest::Approx(2.0));
}

TEST_CASE("negative right-hand sides force surplus handling") {
    // min x  s.t.  -x <= -2  (x >= 2)
    const auto a = matrix(1, 1, {-1.0});
    const auto res = solve_simplex(a, {-2.0}, {}, {}, {1.0});
    REQUIRE(res.status == SolveStatus::optimal);
    CHECK(res.x[0] == doctest::Approx(2.0));
    CHECK(res.objective == doctest::Approx(2.0));
}

TEST_CASE("the classic cycling example terminates under Bland's rule") {
    // Beale's degenerate program; naive most-negative pivoting cycles here.
    const auto a = matrix(3, 4,
                          {0.25, -60.0, -1.0 / 25.0, 9.0,
                           0.5, -90.0, -1.0 / 50.0, 3.0,
                           0.0, 0.0, 1.0, 0.0});
    const auto res = solve_simplex(a, {0.0, 0.0, 1.0}, {}, {},
                                   {-0.75, 150.0, -0.02, 6.0});
    REQUIRE(res.status == SolveStatus::optimal);
    CHECK(res.objective == doctest::Approx(-0.05));
    CHECK(res.x[0] == doctest::Approx(1.0 / 25.0));
    CHECK(res.x[2] == doctest::Approx(1.0));
}

TEST_CASE("degenerate ties stay deterministic") {
    // Two identical rows create a degenerate vertex.
    const auto a = matrix(2, 2, {1.0, 1.0, 1.0, 1.0});
    const auto r1 = solve_simplex(a, {1.0, 1.0}, {}, {}, {-2.0, -1.0});
    const auto r2 = solve_simplex(a, {1.0, 1.0}, {}, {}, {-2.0, -1.0});
    REQUIRE(r1.status == SolveStatus::optimal);
    CHECK(r1.objective == doctest::Approx(-2.0));
    CHECK(r1.x == r2.x);
    CHECK(r1.iterations == r2.iterations);
}

TEST_CASE("multipliers satisfy stationarity and complementary slackness") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    std::uniform_real_distribution<double> pos(0.0, 2.0);
    int solved = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const int m = 1 + static_cast<int>(rng() % 5);
        const int k = 1 + static_cast<int>(rng() % 5);
        DenseMatrix a(m, k);
        for (auto& v : a.data) v = unif(rng);
        // Build b so that a random nonnegative point is feasible.
        std::vector<double> x0(static_cast<size_t>(k));
        for (auto& v : x0) v = pos(rng);
        std::vector<double> b(static_cast<size_t>(m), 0.0);
        for (int r = 0; r < m; ++r) {
            double ax = 0.0;
            for (int c = 0; c < k; ++c) ax += a.at(r, c) * x0[static_cast<size_t>(c)];
            b[static_cast<size_t>(r)] = ax + pos(rng);
        }
        std::vector<double> cost(static_cast<size_t>(k));
        for (auto& v : cost) v = unif(rng);

        const auto res = solve_simplex(a, b, {}, {}, cost);
        REQUIRE(res.status != SolveStatus::infeasible);  // x0 is feasible
        if (res.status != SolveStatus::optimal) continue;
        ++solved;

        // Primal feasibility.
        for (int r = 0; r < m; ++r) {
            double ax = 0.0;
            for (int c = 0; c < k; ++c) ax += a.at(r, c) * res.x[static_cast<size_t>(c)];
            CHECK(ax <= b[static_cast<size_t>(r)] + 1e-7);
            // Complementary slackness on rows.
            CHECK(std::abs(res.ub_duals[static_cast<size_t>(r)] * (b[static_cast<size_t>(r)] - ax)) <=
                  1e-6);
        }
        for (int c = 0; c < k; ++c) {
            CHECK(res.x[static_cast<size_t>(c)] >= -1e-9);
            CHECK(res.reduced_costs[static_cast<size_t>(c)] >= -1e-7);
            // Complementary slackness on variable bounds.
            CHECK(std::abs(res.x[static_cast<size_t>(c)] * res.reduced_costs[static_cast<size_t>(c)]) <=
                  1e-6);
            // Stationarity: rc = c + A'nu.
            double anu = 0.0;
            for (int r = 0; r < m; ++r)
                anu += a.at(r, c) * res.ub_duals[static_cast<size_t>(r)];
            CHECK(cost[static_cast<size_t>(c)] + anu ==
                  doctest::Approx(res.reduced_costs[static_cast<size_t>(c)]).epsilon(1e-6));
        }
        for (double nu : res.ub_duals) CHECK(nu >= -1e-9);
        // Strong duality: c'x* = -b'nu*.
        double bnu = 0.0;
        for (int r = 0; r < m; ++r) bnu += b[static_cast<size_t>(r)] * res.ub_duals[static_cast<size_t>(r)];
        CHECK(res.objective == doctest::Approx(-bnu).epsilon(1e-6));
    }
    CHECK(solved > 100);  // most random instances are bounded
}
