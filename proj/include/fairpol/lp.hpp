#pragma once
// Linear-program model and a self-contained two-phase primal simplex solver.
//
// The solver is deliberately textbook: dense tableau, Dantzig pricing with a
// Bland fallback once degenerate pivots stall, explicit artificial variables
// in phase 1. General variable bounds (including free and box variables) are
// handled by shifting/splitting into nonnegative variables and, for finite
// upper bounds, an extra row. Tolerances: 1e-9 on feasibility and reduced
// costs.

#include <limits>
#include <string>
#include <vector>

#include "fairpol/errors.hpp"
#include "fairpol/policy.hpp"  // Relation

namespace fairpol {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { Maximize, Minimize };

enum class SolveStatus { Optimal, Gap, Infeasible, Unbounded, Timeout };

std::string to_string(SolveStatus s);

/// A linear (or mixed-integer, via the integrality flags) program.
struct LpModel {
    Sense sense = Sense::Maximize;
    std::vector<double> objective;
    double objective_constant = 0.0;
    std::vector<double> lower;  // -inf allowed
    std::vector<double> upper;  // +inf allowed
    std::vector<char> is_integer;

    struct Row {
        std::vector<std::pair<int, double>> terms;  // (variable, coefficient)
        Relation rel = Relation::LessEqual;
        double rhs = 0.0;
    };
    std::vector<Row> rows;

    int num_vars() const { return static_cast<int>(objective.size()); }

    /// Adds a variable, returns its index.
    int add_variable(double lo, double hi, double obj_coeff, bool integral = false);
    void add_row(std::vector<std::pair<int, double>> terms, Relation rel, double rhs);

    /// Structural sanity: finite coefficients, lo <= hi, integral variables
    /// have finite bounds. Throws ConfigError on violations.
    void check_well_formed() const;
};

/// Solve limits shared by the LP and the branch-and-bound layers.
struct SolverLimits {
    double max_seconds = 60.0;
    long max_nodes = 2000000;
    /// Relative gap at which branch-and-bound declares optimality.
    double target_gap = 1e-9;
};

/// Solver result. Also used by the branch-and-bound layer (milp.hpp).
struct MilpSolution {
    std::vector<double> values;  // original variable space; empty if none found
    double objective_value = std::numeric_limits<double>::quiet_NaN();
    SolveStatus status = SolveStatus::Infeasible;
    /// Best proved bound on the optimum (equals objective_value when Optimal).
    double bound = std::numeric_limits<double>::quiet_NaN();
    /// |objective - bound| / max(1, |bound|); zero when Optimal.
    double gap = std::numeric_limits<double>::quiet_NaN();
    long nodes_explored = 0;
    int simplex_iterations = 0;

    bool has_solution() const { return !values.empty(); }
};

/// Solves the continuous relaxation (integrality flags ignored). Statuses:
/// Optimal, Infeasible, Unbounded, or Timeout when limits.max_seconds is
/// exhausted mid-pivot.
MilpSolution solve_lp(const LpModel& model, const SolverLimits& limits = {});

}  // namespace fairpol
