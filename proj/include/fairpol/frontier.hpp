#pragma once
// Discretized Pareto frontier: the alpha grid, per-gridpoint maximal weighted
// welfare, and the constraint set the fairest-policy search ranges over.
//
// Weight orientation is fixed throughout: alpha multiplies group-1 (the
// disadvantaged group's) welfare, so gridpoint j contributes the constraint
//     alpha_j W1(pi) + (1 - alpha_j) W0(pi) >= Wbar_j - lambda / sqrt(n).
// The grid alpha_j = j/(N+1) is symmetric about 1/2, so the orientation does
// not change the swept frontier.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairpol/nuisance.hpp"
#include "fairpol/program.hpp"

namespace fairpol {

struct AlphaGrid {
    std::vector<double> values;  // alpha_j = j/(N+1), j = 1..N
    int N = 0;
};

/// N = ceil(sqrt(n)) unless overridden.
AlphaGrid build_grid(std::size_t n, std::optional<int> override_N = {});

struct FrontierPoint {
    double alpha = 0.0;
    double w_bar = std::numeric_limits<double>::quiet_NaN();
    PolicyValues argmax_policy;
    double w0 = std::numeric_limits<double>::quiet_NaN();
    double w1 = std::numeric_limits<double>::quiet_NaN();
    SolveStatus status = SolveStatus::Infeasible;
    double gap = 0.0;

    bool usable() const { return !argmax_policy.z0.empty(); }
};

struct FrontierConstraintSet {
    std::vector<FrontierPoint> points;
    double lambda = 0.0;
    std::size_t n = 0;

    /// Left-hand functional of constraint j: alpha_j W1 + (1 - alpha_j) W0.
    LinearFunctional weighted_welfare(const ScoreMatrix& sm, std::size_t j) const;
    /// Right-hand side of constraint j: Wbar_j - lambda / sqrt(n).
    double rhs(std::size_t j) const;
};

/// The alpha-weighted welfare functional alpha W1 + (1 - alpha) W0.
LinearFunctional weighted_welfare_functional(const ScoreMatrix& sm, double alpha);

/// Maximizes the alpha-weighted welfare over the program's class. Timeouts
/// with an incumbent are recorded in the point's status and gap, not thrown.
FrontierPoint max_weighted_welfare(const ScoreMatrix& sm, double alpha, PolicyProgram& prog);

/// One FrontierPoint per gridpoint. Individual failures are recorded on the
/// points; at least one gridpoint must solve to proven optimality
/// (AllGridpointsFailed otherwise).
FrontierConstraintSet build_frontier_constraints(const ScoreMatrix& sm, const AlphaGrid& grid,
                                                 PolicyProgram& prog, double lambda);

/// Wraps already-solved points into a constraint set, applying the same
/// at-least-one-proven-maximum validation. Callers that fan the gridpoint
/// solves out over a work pool assemble through here.
FrontierConstraintSet assemble_frontier_constraints(std::vector<FrontierPoint> points,
                                                    double lambda, std::size_t n);

/// Frontier tracing for plots: each gridpoint is solved twice, once under
/// W1 >= W0 and once under W0 >= W1; dominated and duplicate points are
/// removed and the survivors sorted by w0.
std::vector<std::pair<double, double>> enumerate_frontier_curve(const ScoreMatrix& sm,
                                                                const AlphaGrid& grid,
                                                                PolicyProgram& prog);

/// CSV with columns alpha, w_bar, w0, w1, status, gap.
void write_frontier_csv(const FrontierConstraintSet& fc, const std::string& path);

}  // namespace fairpol
