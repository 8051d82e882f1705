#include "fairpol/lp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <utility>

namespace fairpol {

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Gap: return "gap";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::Timeout: return "timeout";
    }
    return "unknown";
}

int LpModel::add_variable(double lo, double hi, double obj_coeff, bool integral) {
    objective.push_back(obj_coeff);
    lower.push_back(lo);
    upper.push_back(hi);
    is_integer.push_back(integral ? 1 : 0);
    return num_vars() - 1;
}

void LpModel::add_row(std::vector<std::pair<int, double>> terms, Relation rel, double rhs) {
    rows.push_back(Row{std::move(terms), rel, rhs});
}

void LpModel::check_well_formed() const {
    const int n = num_vars();
    if (n == 0) throw ConfigError("linear program has no variables");
    if (static_cast<int>(lower.size()) != n || static_cast<int>(upper.size()) != n ||
        static_cast<int>(is_integer.size()) != n) {
        throw ConfigError("linear program variable arrays have inconsistent lengths");
    }
    for (int j = 0; j < n; ++j) {
        if (std::isnan(objective[j]) || std::isinf(objective[j])) {
            throw ConfigError("objective coefficient of variable " + std::to_string(j) +
                              " is not finite");
        }
        if (std::isnan(lower[j]) || std::isnan(upper[j])) {
            throw ConfigError("bound of variable " + std::to_string(j) + " is NaN");
        }
        if (lower[j] > upper[j]) {
            throw ConfigError("variable " + std::to_string(j) + " has lower bound " +
                              std::to_string(lower[j]) + " above upper bound " +
                              std::to_string(upper[j]));
        }
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const Row& row = rows[r];
        if (!std::isfinite(row.rhs)) {
            throw ConfigError("right-hand side of row " + std::to_string(r) + " is not finite");
        }
        for (const auto& [j, a] : row.terms) {
            if (j < 0 || j >= n) {
                throw ConfigError("row " + std::to_string(r) + " references variable " +
                                  std::to_string(j) + " outside the model");
            }
            if (!std::isfinite(a)) {
                throw ConfigError("row " + std::to_string(r) + " has a non-finite coefficient");
            }
        }
    }
}

namespace {

constexpr double kReducedCostTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr int kStallLimit = 64;

enum class PhaseResult { Optimal, Unbounded, IterationLimit };

/// Dense simplex tableau over nonnegative variables. Row `m` is the
/// objective row holding reduced costs z_j - c_j; column `cols` is the
/// right-hand side. Invariant under pivots: basic columns are unit vectors.
struct Tableau {
    int m = 0;     // constraint rows
    int cols = 0;  // variable columns (rhs column excluded)
    int stride = 0;
    std::vector<double> a;
    std::vector<int> basis;        // basic column of each constraint row
    std::vector<char> forbidden;   // columns barred from entering

    void init(int rows_n, int cols_n) {
        m = rows_n;
        cols = cols_n;
        stride = cols + 1;
        a.assign(static_cast<std::size_t>(m + 1) * stride, 0.0);
        basis.assign(m, -1);
        forbidden.assign(cols, 0);
    }
    double& at(int i, int j) { return a[static_cast<std::size_t>(i) * stride + j]; }
    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * stride + j]; }

    void pivot(int pr, int pc) {
        double* prow = &a[static_cast<std::size_t>(pr) * stride];
        const double inv = 1.0 / prow[pc];
        for (int j = 0; j <= cols; ++j) prow[j] *= inv;
        prow[pc] = 1.0;
        for (int i = 0; i <= m; ++i) {
            if (i == pr) continue;
            double* row = &a[static_cast<std::size_t>(i) * stride];
            const double f = row[pc];
            if (f == 0.0) continue;
            for (int j = 0; j <= cols; ++j) row[j] -= f * prow[j];
            row[pc] = 0.0;
        }
        basis[pr] = pc;
    }
};

struct Clock {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double budget_seconds;
    explicit Clock(double budget) : budget_seconds(budget) {}
    bool expired() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() >
               budget_seconds;
    }
};

/// Runs primal simplex pivots until optimality, unboundedness, or a limit.
/// Dantzig pricing; switches to Bland's rule after kStallLimit consecutive
/// non-improving (degenerate) pivots so that cycling cannot occur.
PhaseResult run_simplex(Tableau& t, const Clock& clock, long iteration_cap, int& iterations) {
    bool bland = false;
    int stall = 0;
    double last_value = t.at(t.m, t.cols);
    for (long iter = 0; iter < iteration_cap; ++iter) {
        if ((iter & 127) == 0 && clock.expired()) return PhaseResult::IterationLimit;

        int enter = -1;
        if (!bland) {
            double best = -kReducedCostTol;
            for (int j = 0; j < t.cols; ++j) {
                if (t.forbidden[j]) continue;
                const double r = t.at(t.m, j);
                if (r < best) {
                    best = r;
                    enter = j;
                }
            }
        } else {
            for (int j = 0; j < t.cols; ++j) {
                if (!t.forbidden[j] && t.at(t.m, j) < -kReducedCostTol) {
                    enter = j;
                    break;
                }
            }
        }
        if (enter < 0) return PhaseResult::Optimal;

        int leave = -1;
        double best_ratio = kInf;
        double best_pivot = 0.0;
        for (int i = 0; i < t.m; ++i) {
            const double aij = t.at(i, enter);
            if (aij <= kPivotTol) continue;
            const double ratio = t.at(i, t.cols) / aij;
            bool take = false;
            if (ratio < best_ratio - 1e-12) {
                take = true;
            } else if (ratio < best_ratio + 1e-12 && leave >= 0) {
                // Tied ratio: Bland breaks by smallest basic index (finite
                // termination); otherwise prefer the larger pivot element.
                take = bland ? (t.basis[i] < t.basis[leave]) : (aij > best_pivot);
            }
            if (take) {
                leave = i;
                best_ratio = ratio;
                best_pivot = aij;
            }
        }
        if (leave < 0) return PhaseResult::Unbounded;

        t.pivot(leave, enter);
        ++iterations;

        const double value = t.at(t.m, t.cols);
        if (value > last_value + 1e-12) {
            stall = 0;
            last_value = value;
        } else if (++stall >= kStallLimit) {
            bland = true;
        }
    }
    return PhaseResult::IterationLimit;
}

}  // namespace

MilpSolution solve_lp(const LpModel& model, const SolverLimits& limits) {
    model.check_well_formed();
    const Clock clock(limits.max_seconds);
    const int nx = model.num_vars();
    const bool maximize = model.sense == Sense::Maximize;

    // Substitute each variable by nonnegative ones: x = lo + u for a finite
    // lower bound (finite upper bounds become the extra row u <= hi - lo),
    // x = hi - u when only the upper bound is finite, x = u+ - u- when free.
    struct VarMap {
        int kind;  // 0 shift, 1 mirror, 2 split
        int u0;
        int u1;
        double offset;
    };
    std::vector<VarMap> vmap(nx);
    std::vector<std::pair<int, double>> upper_rows;  // (u column, bound)
    int n_u = 0;
    for (int j = 0; j < nx; ++j) {
        const double lo = model.lower[j];
        const double hi = model.upper[j];
        if (std::isfinite(lo)) {
            vmap[j] = VarMap{0, n_u, -1, lo};
            if (std::isfinite(hi)) upper_rows.emplace_back(n_u, hi - lo);
            ++n_u;
        } else if (std::isfinite(hi)) {
            vmap[j] = VarMap{1, n_u, -1, hi};
            ++n_u;
        } else {
            vmap[j] = VarMap{2, n_u, n_u + 1, 0.0};
            n_u += 2;
        }
    }

    // Objective over u, as a maximization.
    const double sgn = maximize ? 1.0 : -1.0;
    std::vector<double> cu(n_u, 0.0);
    for (int j = 0; j < nx; ++j) {
        const double c = sgn * model.objective[j];
        if (c == 0.0) continue;
        const VarMap& v = vmap[j];
        if (v.kind == 0) {
            cu[v.u0] += c;
        } else if (v.kind == 1) {
            cu[v.u0] -= c;
        } else {
            cu[v.u0] += c;
            cu[v.u1] -= c;
        }
    }

    // Rows over u with nonnegative right-hand sides.
    struct NRow {
        std::vector<std::pair<int, double>> terms;
        Relation rel;
        double rhs;
    };
    std::vector<NRow> nrows;
    nrows.reserve(model.rows.size() + upper_rows.size());
    std::vector<double> scratch(n_u, 0.0);
    for (const LpModel::Row& row : model.rows) {
        double rhs = row.rhs;
        std::vector<int> touched;
        for (const auto& [j, a] : row.terms) {
            if (a == 0.0) continue;
            const VarMap& v = vmap[j];
            if (v.kind == 0) {
                if (scratch[v.u0] == 0.0) touched.push_back(v.u0);
                scratch[v.u0] += a;
                rhs -= a * v.offset;
            } else if (v.kind == 1) {
                if (scratch[v.u0] == 0.0) touched.push_back(v.u0);
                scratch[v.u0] -= a;
                rhs -= a * v.offset;
            } else {
                if (scratch[v.u0] == 0.0) touched.push_back(v.u0);
                scratch[v.u0] += a;
                if (scratch[v.u1] == 0.0) touched.push_back(v.u1);
                scratch[v.u1] -= a;
            }
        }
        NRow nr;
        nr.rel = row.rel;
        nr.rhs = rhs;
        for (int u : touched) {
            if (scratch[u] != 0.0) nr.terms.emplace_back(u, scratch[u]);
            scratch[u] = 0.0;
        }
        nrows.push_back(std::move(nr));
    }
    for (const auto& [u, bound] : upper_rows) {
        nrows.push_back(NRow{{{u, 1.0}}, Relation::LessEqual, bound});
    }
    double sum_abs_rhs = 0.0;
    for (NRow& nr : nrows) {
        // Flipping >= rows with nonpositive rhs turns them into slack-started
        // <= rows, sparing phase 1 an artificial variable each.
        if (nr.rhs < 0.0 || (nr.rhs == 0.0 && nr.rel == Relation::GreaterEqual)) {
            nr.rhs = -nr.rhs;
            for (auto& [u, a] : nr.terms) a = -a;
            if (nr.rel == Relation::LessEqual) {
                nr.rel = Relation::GreaterEqual;
            } else if (nr.rel == Relation::GreaterEqual) {
                nr.rel = Relation::LessEqual;
            }
        }
        sum_abs_rhs += nr.rhs;
    }
    const double feas_tol = 1e-9 * (1.0 + sum_abs_rhs);

    // Column layout: structural u, then per row a slack (<=) or a surplus
    // plus artificial (>=) or an artificial (=).
    const int m = static_cast<int>(nrows.size());
    int cols = n_u;
    std::vector<int> extra_col(m, -1);  // first extra column of each row
    for (int i = 0; i < m; ++i) {
        extra_col[i] = cols;
        cols += (nrows[i].rel == Relation::GreaterEqual) ? 2 : 1;
    }
    Tableau t;
    t.init(m, cols);
    std::vector<char> is_artificial(cols, 0);
    bool any_artificial = false;
    for (int i = 0; i < m; ++i) {
        const NRow& nr = nrows[i];
        for (const auto& [u, a] : nr.terms) t.at(i, u) = a;
        t.at(i, cols) = nr.rhs;
        const int e = extra_col[i];
        if (nr.rel == Relation::LessEqual) {
            t.at(i, e) = 1.0;
            t.basis[i] = e;
        } else if (nr.rel == Relation::GreaterEqual) {
            t.at(i, e) = -1.0;       // surplus
            t.at(i, e + 1) = 1.0;    // artificial
            t.basis[i] = e + 1;
            is_artificial[e + 1] = 1;
            any_artificial = true;
        } else {
            t.at(i, e) = 1.0;  // artificial
            t.basis[i] = e;
            is_artificial[e] = 1;
            any_artificial = true;
        }
    }

    MilpSolution out;
    out.status = SolveStatus::Optimal;
    const long iteration_cap = 200000 + 200L * (m + cols);

    if (any_artificial) {
        // Phase 1: maximize minus the sum of artificials. Reduced costs start
        // at -c_j (+1 on artificial columns), then basic artificial rows are
        // folded in so basic columns price at zero.
        for (int j = 0; j < cols; ++j) t.at(m, j) = is_artificial[j] ? 1.0 : 0.0;
        t.at(m, cols) = 0.0;
        for (int i = 0; i < m; ++i) {
            if (!is_artificial[t.basis[i]]) continue;
            for (int j = 0; j <= cols; ++j) t.at(m, j) -= t.at(i, j);
        }
        const PhaseResult r = run_simplex(t, clock, iteration_cap, out.simplex_iterations);
        if (r == PhaseResult::IterationLimit) {
            out.status = SolveStatus::Timeout;
            return out;
        }
        if (r == PhaseResult::Unbounded) {
            throw SolverError("phase-1 feasibility problem reported unbounded");
        }
        if (t.at(m, cols) < -feas_tol) {
            out.status = SolveStatus::Infeasible;
            return out;
        }
        // Drive artificials that stayed basic at level zero out of the basis;
        // rows that admit no pivot are redundant and keep a barred artificial.
        for (int i = 0; i < m; ++i) {
            if (!is_artificial[t.basis[i]]) continue;
            for (int j = 0; j < cols; ++j) {
                if (is_artificial[j]) continue;
                if (std::fabs(t.at(i, j)) > 1e-7) {
                    t.pivot(i, j);
                    break;
                }
            }
        }
        for (int j = 0; j < cols; ++j) {
            if (is_artificial[j]) t.forbidden[j] = 1;
        }
    }

    // Phase 2 objective row: reduced costs for the real costs.
    for (int j = 0; j <= cols; ++j) t.at(m, j) = 0.0;
    for (int j = 0; j < n_u; ++j) t.at(m, j) = -cu[j];
    for (int i = 0; i < m; ++i) {
        const int b = t.basis[i];
        if (b >= n_u || cu[b] == 0.0) continue;
        const double cb = cu[b];
        for (int j = 0; j <= cols; ++j) t.at(m, j) += cb * t.at(i, j);
    }
    const PhaseResult r2 = run_simplex(t, clock, iteration_cap, out.simplex_iterations);
    if (r2 == PhaseResult::IterationLimit) {
        out.status = SolveStatus::Timeout;
        return out;
    }
    if (r2 == PhaseResult::Unbounded) {
        out.status = SolveStatus::Unbounded;
        out.bound = maximize ? kInf : -kInf;
        return out;
    }

    // Recover x from the basic u values and evaluate the objective exactly.
    std::vector<double> u(n_u, 0.0);
    for (int i = 0; i < m; ++i) {
        if (t.basis[i] < n_u) u[t.basis[i]] = t.at(i, cols);
    }
    out.values.resize(nx);
    for (int j = 0; j < nx; ++j) {
        const VarMap& v = vmap[j];
        double x;
        if (v.kind == 0) {
            x = v.offset + u[v.u0];
        } else if (v.kind == 1) {
            x = v.offset - u[v.u0];
        } else {
            x = u[v.u0] - u[v.u1];
        }
        out.values[j] = std::min(std::max(x, model.lower[j]), model.upper[j]);
    }
    double obj = model.objective_constant;
    for (int j = 0; j < nx; ++j) obj += model.objective[j] * out.values[j];
    out.objective_value = obj;
    out.bound = obj;
    out.gap = 0.0;
    return out;
}

}  // namespace fairpol
