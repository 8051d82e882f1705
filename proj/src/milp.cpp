#include "fairpol/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <utility>
#include <vector>

namespace fairpol {

namespace {

constexpr double kIntegralityTol = 1e-6;

struct Node {
    double parent_bound;  // relaxation value of the parent (maximization)
    std::vector<double> lower;
    std::vector<double> upper;
    int depth;
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        return a.parent_bound < b.parent_bound;  // best bound on top
    }
};

double elapsed_seconds(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

/// Index of the integer variable farthest from the lattice among those at
/// least `threshold` away, or -1 if none is.
int most_fractional(const LpModel& model, const std::vector<double>& x, double threshold) {
    int pick = -1;
    double best = threshold;
    for (int j = 0; j < model.num_vars(); ++j) {
        if (!model.is_integer[j]) continue;
        const double frac = std::fabs(x[j] - std::round(x[j]));
        if (frac > best) {
            best = frac;
            pick = j;
        }
    }
    return pick;
}

double relative_gap(double incumbent, double bound) {
    return std::fabs(incumbent - bound) / std::max(1.0, std::fabs(bound));
}

}  // namespace

MilpSolution solve_milp(const LpModel& model, const SolverLimits& limits) {
    model.check_well_formed();
    for (int j = 0; j < model.num_vars(); ++j) {
        if (model.is_integer[j] &&
            (!std::isfinite(model.lower[j]) || !std::isfinite(model.upper[j]))) {
            throw UnboundedBox("integer variable " + std::to_string(j) +
                               " has an unbounded box; branch and bound needs finite bounds");
        }
    }

    // Work on a maximization copy; flip the objective back at the end.
    LpModel work = model;
    const bool flipped = model.sense == Sense::Minimize;
    if (flipped) {
        work.sense = Sense::Maximize;
        for (double& c : work.objective) c = -c;
        work.objective_constant = -work.objective_constant;
    }
    // Integer bounds can be tightened to the integer lattice immediately.
    for (int j = 0; j < work.num_vars(); ++j) {
        if (work.is_integer[j]) {
            work.lower[j] = std::ceil(work.lower[j] - kIntegralityTol);
            work.upper[j] = std::floor(work.upper[j] + kIntegralityTol);
            if (work.lower[j] > work.upper[j]) {
                MilpSolution none;
                none.status = SolveStatus::Infeasible;
                return none;
            }
        }
    }

    const auto t_start = std::chrono::steady_clock::now();
    auto remaining = [&]() { return limits.max_seconds - elapsed_seconds(t_start); };

    MilpSolution result;
    result.status = SolveStatus::Infeasible;
    bool have_incumbent = false;
    double incumbent = -kInf;  // maximization value
    std::vector<double> incumbent_x;

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    open.push(Node{kInf, work.lower, work.upper, 0});

    long nodes = 0;
    bool out_of_time = false;
    bool out_of_nodes = false;
    bool root_unbounded = false;

    // Snap integer variables onto the lattice; when any of them actually
    // moved, re-solve the node with the integers fixed there so the
    // continuous variables adjust. A point whose snapped version has no
    // feasible completion is not a solution at all (rounding a variable
    // that sits a hair inside the tolerance can tip a linking row), and the
    // caller must branch instead of keeping it.
    auto accept = [&](const Node& node, const std::vector<double>& x_raw) -> bool {
        std::vector<double> x = x_raw;
        double moved = 0.0;
        for (int j = 0; j < work.num_vars(); ++j) {
            if (!work.is_integer[j]) continue;
            const double snapped = std::round(x[j]);
            moved = std::max(moved, std::fabs(x[j] - snapped));
            x[j] = snapped;
        }
        if (moved > 1e-12) {
            LpModel fixed = work;
            fixed.lower = node.lower;
            fixed.upper = node.upper;
            for (int j = 0; j < work.num_vars(); ++j) {
                if (!work.is_integer[j]) continue;
                fixed.lower[j] = x[j];
                fixed.upper[j] = x[j];
            }
            SolverLimits lp_limits;
            lp_limits.max_seconds = std::max(remaining(), 0.0);
            MilpSolution polish = solve_lp(fixed, lp_limits);
            result.simplex_iterations += polish.simplex_iterations;
            if (polish.status != SolveStatus::Optimal) return false;
            x = std::move(polish.values);
        }
        double v = work.objective_constant;
        for (int j = 0; j < work.num_vars(); ++j) v += work.objective[j] * x[j];
        if (!have_incumbent || v > incumbent) {
            have_incumbent = true;
            incumbent = v;
            incumbent_x = std::move(x);
        }
        return true;
    };

    while (!open.empty()) {
        if (remaining() <= 0.0) {
            out_of_time = true;
            break;
        }
        if (nodes >= limits.max_nodes) {
            out_of_nodes = true;
            break;
        }
        // Best-first: once the best open bound cannot beat the incumbent by
        // more than the target gap, the incumbent is proved. The node stays
        // in the queue so the final bound report sees it.
        if (have_incumbent) {
            const double top_bound = open.top().parent_bound;
            if (top_bound <= incumbent + 1e-12 ||
                relative_gap(incumbent, std::max(top_bound, incumbent)) <= limits.target_gap) {
                break;
            }
        }
        Node node = open.top();
        open.pop();

        LpModel sub = work;
        sub.lower = node.lower;
        sub.upper = node.upper;
        SolverLimits lp_limits;
        lp_limits.max_seconds = std::max(remaining(), 0.0);
        MilpSolution relax = solve_lp(sub, lp_limits);
        ++nodes;
        result.simplex_iterations += relax.simplex_iterations;

        if (relax.status == SolveStatus::Timeout) {
            out_of_time = true;
            break;
        }
        if (relax.status == SolveStatus::Infeasible) continue;
        if (relax.status == SolveStatus::Unbounded) {
            if (node.depth == 0) root_unbounded = true;
            break;
        }

        const double bound_here = relax.objective_value;
        if (have_incumbent && bound_here <= incumbent + 1e-12) continue;

        int branch_var = most_fractional(sub, relax.values, kIntegralityTol);
        if (branch_var < 0) {
            const bool accepted = accept(node, relax.values);
            // The snapped-and-repaired point can be worth less than this
            // node's relaxation bound (big-M rows loosen under hair-width
            // fractionality), and when snapping has no feasible repair it is
            // no point at all. Either way the subtree may still hold better
            // integral points, so it only retires once its bound is beaten;
            // otherwise branching on the not-exactly-integral variable splits
            // it onto exact bounds.
            if (accepted && bound_here <= incumbent + 1e-12) continue;
            branch_var = most_fractional(sub, relax.values, 0.0);
            if (branch_var < 0) continue;  // exactly integral: bound attained
        }

        const double split = relax.values[branch_var];
        Node down{bound_here, node.lower, node.upper, node.depth + 1};
        down.upper[branch_var] = std::floor(split);
        Node up{bound_here, std::move(node.lower), std::move(node.upper), node.depth + 1};
        up.lower[branch_var] = std::ceil(split);
        if (down.lower[branch_var] <= down.upper[branch_var]) open.push(std::move(down));
        if (up.lower[branch_var] <= up.upper[branch_var]) open.push(std::move(up));
    }

    result.nodes_explored = nodes;

    if (root_unbounded) {
        result.status = SolveStatus::Unbounded;
        result.bound = model.sense == Sense::Maximize ? kInf : -kInf;
        return result;
    }

    // The proved bound is the best of the incumbent and all open nodes.
    double bound = have_incumbent ? incumbent : -kInf;
    if (!open.empty()) bound = std::max(bound, open.top().parent_bound);

    const double sense_sign = flipped ? -1.0 : 1.0;
    if (have_incumbent) {
        result.values = std::move(incumbent_x);
        result.objective_value = sense_sign * incumbent;
        result.bound = sense_sign * bound;
        result.gap = relative_gap(incumbent, bound);
        if (out_of_time) {
            result.status = SolveStatus::Timeout;
        } else if (out_of_nodes) {
            result.status = SolveStatus::Gap;
        } else if (bound <= incumbent + 1e-12 || result.gap <= 1e-12) {
            result.status = SolveStatus::Optimal;
            result.gap = 0.0;
            result.bound = result.objective_value;
        } else {
            result.status = SolveStatus::Gap;  // stopped at the target gap
        }
        return result;
    }

    if (out_of_time || out_of_nodes) {
        result.status = SolveStatus::Timeout;
        return result;
    }
    result.status = SolveStatus::Infeasible;
    return result;
}

}  // namespace fairpol
