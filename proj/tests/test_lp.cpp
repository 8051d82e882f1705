#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "fairpol/lp.hpp"
#include "fairpol/rng.hpp"

using namespace fairpol;

namespace {

// Exhaustive vertex oracle for small LPs whose variables all carry finite
// bounds (so the feasible set is a polytope and any optimum sits on a
// vertex). Every choice of num_vars constraints from {rows, bounds} is
// solved as an equality system; feasible solutions are scored directly.
std::optional<double> best_vertex_value(const LpModel& m) {
    const int n = m.num_vars();
    struct Line {
        std::vector<double> a;
        double b;
    };
    std::vector<Line> lines;
    for (const auto& row : m.rows) {
        Line ln;
        ln.a.assign(n, 0.0);
        for (auto [j, c] : row.terms) ln.a[j] += c;
        ln.b = row.rhs;
        lines.push_back(ln);
    }
    for (int j = 0; j < n; ++j) {
        Line lo;
        lo.a.assign(n, 0.0);
        lo.a[j] = 1.0;
        lo.b = m.lower[j];
        lines.push_back(lo);
        Line hi = lo;
        hi.b = m.upper[j];
        lines.push_back(hi);
    }

    const double tol = 1e-7;
    auto feasible = [&](const Eigen::VectorXd& x) {
        for (int j = 0; j < n; ++j) {
            if (x[j] < m.lower[j] - tol || x[j] > m.upper[j] + tol) return false;
        }
        for (const auto& row : m.rows) {
            double lhs = 0.0;
            for (auto [j, c] : row.terms) lhs += c * x[j];
            if (row.rel == Relation::LessEqual && lhs > row.rhs + tol) return false;
            if (row.rel == Relation::GreaterEqual && lhs < row.rhs - tol) return false;
            if (row.rel == Relation::Equal && std::fabs(lhs - row.rhs) > tol) return false;
        }
        return true;
    };

    std::optional<double> best;
    std::vector<int> pick(n, 0);
    const int total = static_cast<int>(lines.size());
    std::function<void(int, int)> recurse = [&](int start, int depth) {
        if (depth == n) {
            Eigen::MatrixXd A(n, n);
            Eigen::VectorXd b(n);
            for (int r = 0; r < n; ++r) {
                for (int j = 0; j < n; ++j) A(r, j) = lines[pick[r]].a[j];
                b[r] = lines[pick[r]].b;
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
            if (!lu.isInvertible()) return;
            Eigen::VectorXd x = lu.solve(b);
            if (!feasible(x)) return;
            double v = m.objective_constant;
            for (int j = 0; j < n; ++j) v += m.objective[j] * x[j];
            if (!best) {
                best = v;
            } else if (m.sense == Sense::Maximize) {
                if (v > *best) best = v;
            } else if (v < *best) {
                best = v;
            }
            return;
        }
        for (int k = start; k < total; ++k) {
            pick[depth] = k;
            recurse(k + 1, depth + 1);
        }
    };
    recurse(0, 0);
    return best;
}

}  // namespace

TEST_CASE("textbook maximization lands on the shared corner") {
    LpModel m;
    int x = m.add_variable(0.0, 1.0, 1.0);
    int y = m.add_variable(0.0, 1.0, 1.0);
    m.add_row({{x, 1.0}, {y, 1.0}}, Relation::LessEqual, 1.0);
    MilpSolution sol = solve_lp(m);
    CHECK(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective_value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sol.values[x] + sol.values[y] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("free variables, negative bounds, and the objective constant") {
    // min x subject to x >= -3, x free otherwise.
    LpModel m;
    m.sense = Sense::Minimize;
    int x = m.add_variable(-kInf, kInf, 1.0);
    m.objective_constant = 5.0;
    m.add_row({{x, 1.0}}, Relation::GreaterEqual, -3.0);
    MilpSolution sol = solve_lp(m);
    CHECK(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective_value == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(sol.values[x] == doctest::Approx(-3.0).epsilon(1e-9));
}

TEST_CASE("equality rows and negative right-hand sides") {
    // max 2a + b  s.t.  a + b = 0.5,  -a <= -0.1  (a >= 0.1), both in [0,1].
    LpModel m;
    int a = m.add_variable(0.0, 1.0, 2.0);
    int b = m.add_variable(0.0, 1.0, 1.0);
    m.add_row({{a, 1.0}, {b, 1.0}}, Relation::Equal, 0.5);
    m.add_row({{a, -1.0}}, Relation::LessEqual, -0.1);
    MilpSolution sol = solve_lp(m);
    CHECK(sol.status == SolveStatus::Optimal);
    CHECK(sol.values[a] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(std::fabs(sol.values[b]) <= 1e-9);
    CHECK(sol.objective_value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("zero right-hand-side ordering rows are honoured") {
    // max y  s.t.  y - x >= 0,  x >= 0.4; pushing y up drags x's floor in.
    LpModel m;
    int x = m.add_variable(0.0, 1.0, 0.0);
    int y = m.add_variable(0.0, 0.7, 1.0);
    m.add_row({{y, 1.0}, {x, -1.0}}, Relation::GreaterEqual, 0.0);
    m.add_row({{x, 1.0}}, Relation::GreaterEqual, 0.4);
    MilpSolution sol = solve_lp(m);
    CHECK(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective_value == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(sol.values[y] >= sol.values[x] - 1e-9);
}

TEST_CASE("infeasible and unbounded programs are flagged") {
    LpModel infeasible;
    int x = infeasible.add_variable(0.0, 1.0, 1.0);
    infeasible.add_row({{x, 1.0}}, Relation::GreaterEqual, 2.0);
    CHECK(solve_lp(infeasible).status == SolveStatus::Infeasible);

    LpModel unbounded;
    unbounded.add_variable(0.0, kInf, 1.0);
    CHECK(solve_lp(unbounded).status == SolveStatus::Unbounded);

    LpModel free_unbounded;
    free_unbounded.sense = Sense::Minimize;
    free_unbounded.add_variable(-kInf, kInf, 1.0);
    CHECK(solve_lp(free_unbounded).status == SolveStatus::Unbounded);
}

TEST_CASE("a classic degenerate cycling instance still solves") {
    // Four variables, two degenerate rows through the origin; naive largest-
    // coefficient pricing is known to loop here, so this exercises the
    // anti-cycling fallback.
    LpModel m;
    m.sense = Sense::Minimize;
    int x1 = m.add_variable(0.0, 1e4, -0.75);
    int x2 = m.add_variable(0.0, 1e4, 150.0);
    int x3 = m.add_variable(0.0, 1e4, -0.02);
    int x4 = m.add_variable(0.0, 1e4, 6.0);
    m.add_row({{x1, 0.25}, {x2, -60.0}, {x3, -0.04}, {x4, 9.0}}, Relation::LessEqual, 0.0);
    m.add_row({{x1, 0.5}, {x2, -90.0}, {x3, -0.02}, {x4, 3.0}}, Relation::LessEqual, 0.0);
    m.add_row({{x3, 1.0}}, Relation::LessEqual, 1.0);
    MilpSolution sol = solve_lp(m);
    CHECK(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective_value == doctest::Approx(-0.05).epsilon(1e-9));
    std::optional<double> oracle = best_vertex_value(m);
    REQUIRE(oracle.has_value());
    CHECK(sol.objective_value == doctest::Approx(*oracle).epsilon(1e-7));
}

TEST_CASE("random boxed programs agree with vertex enumeration") {
    Rng rng(424242u);
    int solved = 0;
    for (int t = 0; t < 60; ++t) {
        LpModel m;
        m.sense = t % 2 == 0 ? Sense::Maximize : Sense::Minimize;
        const int n = 2 + static_cast<int>(rng.uniform_int(2));  // 2 or 3 vars
        for (int j = 0; j < n; ++j) {
            const double lo = rng.uniform(-2.0, 0.0);
            const double hi = lo + rng.uniform(0.5, 3.0);
            m.add_variable(lo, hi, rng.uniform(-2.0, 2.0));
        }
        m.objective_constant = rng.uniform(-1.0, 1.0);
        const int rows = 2 + static_cast<int>(rng.uniform_int(3));
        for (int r = 0; r < rows; ++r) {
            std::vector<std::pair<int, double>> terms;
            for (int j = 0; j < n; ++j) terms.push_back({j, rng.uniform(-2.0, 2.0)});
            const double roll = rng.uniform();
            Relation rel = roll < 0.4   ? Relation::LessEqual
                           : roll < 0.8 ? Relation::GreaterEqual
                                        : Relation::Equal;
            m.add_row(terms, rel, rng.uniform(-1.5, 1.5));
        }

        MilpSolution sol = solve_lp(m);
        std::optional<double> oracle = best_vertex_value(m);
        if (!oracle) {
            CHECK(sol.status == SolveStatus::Infeasible);
            continue;
        }
        REQUIRE(sol.status == SolveStatus::Optimal);
        CHECK(sol.objective_value == doctest::Approx(*oracle).epsilon(1e-7));
        ++solved;
    }
    CHECK(solved >= 20);  // the battery must actually exercise feasible cases
}

TEST_CASE("model validation rejects malformed structures") {
    LpModel bad_bounds;
    bad_bounds.add_variable(1.0, 0.0, 1.0);
    CHECK_THROWS_AS(bad_bounds.check_well_formed(), ConfigError);

    LpModel nan_coeff;
    int x = nan_coeff.add_variable(0.0, 1.0, std::numeric_limits<double>::quiet_NaN());
    (void)x;
    CHECK_THROWS_AS(nan_coeff.check_well_formed(), ConfigError);
}
