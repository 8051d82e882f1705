#include "fairpol/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "fairpol/errors.hpp"

namespace fairpol {

AlphaGrid build_grid(std::size_t n, std::optional<int> override_N) {
    if (n < 1) throw ConfigError("grid needs a sample size of at least 1");
    int N;
    if (override_N) {
        N = *override_N;
        if (N < 1) throw ConfigError("grid size override must be at least 1");
    } else {
        N = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
    }
    AlphaGrid g;
    g.N = N;
    g.values.resize(N);
    for (int j = 1; j <= N; ++j) {
        g.values[j - 1] = static_cast<double>(j) / static_cast<double>(N + 1);
    }
    return g;
}

LinearFunctional weighted_welfare_functional(const ScoreMatrix& sm, double alpha) {
    LinearFunctional f = welfare_functional(sm, 1);
    LinearFunctional w0 = welfare_functional(sm, 0);
    for (auto& c : f.c0) c *= alpha;
    for (auto& c : f.c1) c *= alpha;
    f.constant *= alpha;
    f.add_scaled(w0, 1.0 - alpha);
    return f;
}

LinearFunctional FrontierConstraintSet::weighted_welfare(const ScoreMatrix& sm,
                                                         std::size_t j) const {
    return weighted_welfare_functional(sm, points.at(j).alpha);
}

double FrontierConstraintSet::rhs(std::size_t j) const {
    return points.at(j).w_bar - lambda / std::sqrt(static_cast<double>(n));
}

FrontierPoint max_weighted_welfare(const ScoreMatrix& sm, double alpha, PolicyProgram& prog) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ConfigError("frontier weight must lie strictly inside (0,1), got " +
                          std::to_string(alpha));
    }
    FrontierPoint pt;
    pt.alpha = alpha;
    ProgramResult res = prog.maximize(weighted_welfare_functional(sm, alpha));
    pt.status = res.status;
    pt.gap = res.gap;
    if (res.feasible()) {
        pt.argmax_policy = std::move(res.policy);
        const auto [w0, w1] = empirical_welfare(sm, pt.argmax_policy);
        pt.w0 = w0;
        pt.w1 = w1;
        pt.w_bar = alpha * w1 + (1.0 - alpha) * w0;
    }
    return pt;
}

FrontierConstraintSet build_frontier_constraints(const ScoreMatrix& sm, const AlphaGrid& grid,
                                                 PolicyProgram& prog, double lambda) {
    std::vector<FrontierPoint> points;
    points.reserve(grid.values.size());
    for (double alpha : grid.values) points.push_back(max_weighted_welfare(sm, alpha, prog));
    return assemble_frontier_constraints(std::move(points), lambda, sm.n);
}

FrontierConstraintSet assemble_frontier_constraints(std::vector<FrontierPoint> points,
                                                    double lambda, std::size_t n) {
    if (lambda < 0.0) throw ConfigError("frontier slackness lambda must be nonnegative");
    bool any_optimal = false;
    for (const FrontierPoint& pt : points) {
        any_optimal = any_optimal || pt.status == SolveStatus::Optimal;
    }
    if (!any_optimal) {
        throw AllGridpointsFailed("no gridpoint reached a proven welfare maximum; cannot "
                                  "anchor the approximate Pareto frontier");
    }
    FrontierConstraintSet fc;
    fc.lambda = lambda;
    fc.n = n;
    fc.points = std::move(points);
    return fc;
}

std::vector<std::pair<double, double>> enumerate_frontier_curve(const ScoreMatrix& sm,
                                                                const AlphaGrid& grid,
                                                                PolicyProgram& prog) {
    // Ordering side constraints W1 - W0 >= 0 and W0 - W1 >= 0.
    LinearFunctional diff = welfare_functional(sm, 1);
    diff.add_scaled(welfare_functional(sm, 0), -1.0);

    std::vector<std::pair<double, double>> raw;
    for (double alpha : grid.values) {
        const LinearFunctional objective = weighted_welfare_functional(sm, alpha);
        for (int side = 0; side < 2; ++side) {
            LinearFunctional ordered = diff;
            if (side == 1) ordered.add_scaled(diff, -2.0);  // flips the sign
            prog.push_constraint(ordered, Relation::GreaterEqual, 0.0);
            ProgramResult res = prog.maximize(objective);
            prog.pop_constraint();
            if (res.status == SolveStatus::Infeasible) continue;
            if (!res.feasible()) continue;
            const auto [w0, w1] = empirical_welfare(sm, res.policy);
            raw.emplace_back(w0, w1);
        }
    }

    // Keep the non-dominated subset (ties are duplicates, dropped).
    std::vector<std::pair<double, double>> kept;
    for (const auto& a : raw) {
        bool drop = false;
        for (const auto& b : raw) {
            if (b.first >= a.first + 1e-12 && b.second >= a.second - 1e-12) drop = true;
            if (b.first >= a.first - 1e-12 && b.second >= a.second + 1e-12) drop = true;
            if (drop) break;
        }
        if (drop) continue;
        bool dup = false;
        for (const auto& k : kept) {
            if (std::fabs(k.first - a.first) <= 1e-12 && std::fabs(k.second - a.second) <= 1e-12) {
                dup = true;
                break;
            }
        }
        if (!dup) kept.push_back(a);
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

void write_frontier_csv(const FrontierConstraintSet& fc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << "alpha,w_bar,w0,w1,status,gap\n";
    char buf[512];
    for (const FrontierPoint& pt : fc.points) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%s,%.17g\n", pt.alpha, pt.w_bar,
                      pt.w0, pt.w1, to_string(pt.status).c_str(), pt.gap);
        out << buf;
    }
    if (!out.good()) throw DataError("failed while writing '" + path + "'");
}

}  // namespace fairpol
