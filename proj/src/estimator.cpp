// Fair-policy-targeting pipeline: anchor the discretized welfare frontier,
// search each gridpoint's near-optimal set for the fairest policy, break ties
// toward the disadvantaged group, and report every measure at the winner.
// Also the two competitor estimators (weighted EWM, fairness-capped EWM).

#include "fairpol/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fairpol/errors.hpp"
#include "fairpol/threadpool.hpp"

namespace fairpol {
namespace {

/// Gridpoints whose minima agree within this are ties (resolved by alpha).
constexpr double kTieTol = 1e-12;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void require_linear_objective(UnfairnessKind kind) {
    if (kind == UnfairnessKind::PredictiveParity) {
        throw NonLinearObjective(
            "predictive parity is a ratio of treated-conditional means with no "
            "linear-in-policy form; it can be evaluated at a policy but not optimized");
    }
}

unsigned pool_width(int threads) { return threads <= 0 ? 0u : static_cast<unsigned>(threads); }

/// Minimizes the measure over the class cut down to frontier constraint j.
ProgramResult minimize_at_gridpoint(PolicyProgram& prog, const FrontierConstraintSet& fcs,
                                    const ScoreMatrix& sm, std::size_t j,
                                    const UnfairnessMeasure& measure) {
    prog.push_constraint(fcs.weighted_welfare(sm, j), Relation::GreaterEqual, fcs.rhs(j));
    ProgramResult res;
    try {
        res = prog.minimize(measure.coeffs, measure.absolute);
    } catch (...) {
        prog.pop_constraint();
        throw;
    }
    prog.pop_constraint();
    return res;
}

/// Picks the winning gridpoint: smallest subproblem value, and among values
/// within kTieTol of that minimum, the largest alpha. Two passes, so the
/// outcome never depends on scan order or on drift along a chain of ties.
FptResult assemble_fpt_result(const Dataset& ds, const NuisanceFit& nf, const ScoreMatrix& sm,
                              const RunConfig& config, FrontierConstraintSet fcs,
                              const std::vector<ProgramResult>& sub) {
    const std::size_t N = fcs.points.size();
    std::vector<GridpointDiagnostics> diags(N);
    for (std::size_t j = 0; j < N; ++j) {
        const FrontierPoint& pt = fcs.points[j];
        GridpointDiagnostics& d = diags[j];
        d.alpha = pt.alpha;
        d.w_bar = pt.w_bar;
        d.frontier_status = pt.status;
        d.frontier_gap = pt.gap;
        d.subproblem_status = sub[j].status;
        d.subproblem_gap = sub[j].gap;
        if (sub[j].feasible()) d.unfairness = sub[j].value;
    }

    double vmin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < N; ++j) {
        if (fcs.points[j].usable() && sub[j].feasible()) vmin = std::min(vmin, sub[j].value);
    }
    long pick = -1;
    for (std::size_t j = 0; j < N; ++j) {
        if (fcs.points[j].usable() && sub[j].feasible() && sub[j].value <= vmin + kTieTol) {
            pick = static_cast<long>(j);  // alphas ascend, so the last hit has the largest
        }
    }
    if (pick < 0) {
        throw AllGridpointsFailed(
            "every gridpoint's fairest-policy subproblem failed to produce a feasible policy");
    }

    FptResult r;
    r.policy = sub[static_cast<std::size_t>(pick)].policy;
    r.chosen_alpha = fcs.points[static_cast<std::size_t>(pick)].alpha;
    r.objective_value = sub[static_cast<std::size_t>(pick)].value;
    r.per_gridpoint = std::move(diags);
    r.frontier = std::move(fcs);
    r.report = evaluate_policy(ds, nf, sm, r.policy, config.envy_second_term);
    r.config_echo = render_config(config, /*include_output_dir=*/false);
    return r;
}

struct FittedPipeline {
    NuisanceFit nf;
    ScoreMatrix sm;
};

FittedPipeline fit_pipeline(const Dataset& ds, const RunConfig& config) {
    FoldAssignment folds = split_folds(ds, config.folds, config.seed);
    NuisanceFit nf = fit_nuisance(ds, folds, config.ridge, {config.clip, 1.0 - config.clip},
                                  config.pooling);
    ScoreMatrix sm = compute_scores(ds, nf);
    return {std::move(nf), std::move(sm)};
}

}  // namespace

MeasureReport evaluate_policy(const Dataset& ds, const NuisanceFit& nf, const ScoreMatrix& sm,
                              const PolicyValues& pv, EnvySecondTerm envy_form) {
    MeasureReport r;
    std::pair<double, double> w = empirical_welfare(sm, pv);
    r.w0 = w.first;
    r.w1 = w.second;
    r.prediction_disparity = prediction_disparity(pv, ds.attribute, sm.p_hat[1]);
    r.welfare_disparity = welfare_disparity(sm, pv);
    r.incentive = incentive_compatibility(sm, pv);
    r.envy = counterfactual_envy(nf, sm, pv, envy_form);
    try {
        r.predictive_parity = predictive_parity(ds, nf, pv);
    } catch (const NonDeterministicPolicy& e) {
        r.parity_skip_reason = e.what();
    } catch (const ZeroTreatedGroup& e) {
        r.parity_skip_reason = e.what();
    }
    return r;
}

FptResult fair_policy_targeting_over(PolicyProgram& prog, const Dataset& ds,
                                     const NuisanceFit& nf, const ScoreMatrix& sm,
                                     const RunConfig& config) {
    require_linear_objective(config.measure);
    const UnfairnessMeasure measure = make_measure(config.measure, config.measure_absolute, ds,
                                                   nf, sm, config.envy_second_term);
    const AlphaGrid grid = build_grid(ds.n, config.grid_n);
    FrontierConstraintSet fcs =
        build_frontier_constraints(sm, grid, prog, config.resolve_lambda(ds.n));
    std::vector<ProgramResult> sub(fcs.points.size());
    for (std::size_t j = 0; j < fcs.points.size(); ++j) {
        if (!fcs.points[j].usable()) continue;
        sub[j] = minimize_at_gridpoint(prog, fcs, sm, j, measure);
    }
    return assemble_fpt_result(ds, nf, sm, config, std::move(fcs), sub);
}

CompetitorResult ewm_policy_over(PolicyProgram& prog, const Dataset& ds, const NuisanceFit& nf,
                                 const ScoreMatrix& sm, const RunConfig& config,
                                 std::optional<double> omega) {
    std::optional<double> requested = omega ? omega : config.omega;
    if (requested && !(*requested > 0.0 && *requested < 1.0)) {
        throw ConfigError("welfare weight omega must lie strictly between 0 and 1, got " +
                          fmt(*requested));
    }
    const double w = requested ? *requested : sm.p_hat[1];
    ProgramResult res = prog.maximize(weighted_welfare_functional(sm, w));
    if (!res.feasible()) {
        throw InfeasibleProgram("welfare maximization over the policy class failed: " +
                                to_string(res.status));
    }
    CompetitorResult r;
    r.policy = res.policy;
    r.kind = requested ? "weighted(" + fmt(w) + ")" : "ewm";
    r.objective_value = res.value;
    r.report = evaluate_policy(ds, nf, sm, r.policy, config.envy_second_term);
    return r;
}

CompetitorResult constrained_ewm_over(PolicyProgram& prog, const Dataset& ds,
                                      const NuisanceFit& nf, const ScoreMatrix& sm,
                                      const RunConfig& config, double kappa) {
    require_linear_objective(config.measure);
    if (kappa < 0.0) throw ConfigError("fairness cap kappa must be nonnegative");
    const UnfairnessMeasure measure = make_measure(config.measure, config.measure_absolute, ds,
                                                   nf, sm, config.envy_second_term);
    const double cap = kappa / static_cast<double>(ds.n);

    int pushed = 0;
    ProgramResult res;
    try {
        if (std::isfinite(cap)) {
            prog.push_constraint(measure.coeffs, Relation::LessEqual, cap);
            ++pushed;
            if (measure.absolute) {
                prog.push_constraint(measure.coeffs, Relation::GreaterEqual, -cap);
                ++pushed;
            }
        }
        res = prog.maximize(weighted_welfare_functional(sm, sm.p_hat[1]));
    } catch (...) {
        while (pushed-- > 0) prog.pop_constraint();
        throw;
    }
    while (pushed-- > 0) prog.pop_constraint();

    if (res.status == SolveStatus::Infeasible) {
        throw InfeasibleFairnessConstraint("no policy in the class keeps the measure within " +
                                           fmt(cap) + " (= kappa/n)");
    }
    if (!res.feasible()) {
        throw InfeasibleProgram("capped welfare maximization failed: " + to_string(res.status));
    }
    CompetitorResult r;
    r.policy = res.policy;
    r.kind = "constrained(" + fmt(kappa) + ")";
    r.objective_value = res.value;
    r.report = evaluate_policy(ds, nf, sm, r.policy, config.envy_second_term);
    return r;
}

FptResult fair_policy_targeting(const Dataset& ds, const RunConfig& config) {
    require_linear_objective(config.measure);
    FittedPipeline fp = fit_pipeline(ds, config);

    if (config.threads <= 1) {
        MilpPolicyProgram prog(config.policy, ds, config.solver);
        return fair_policy_targeting_over(prog, ds, fp.nf, fp.sm, config);
    }

    // Work-pool path: gridpoint solves are independent, so each task builds
    // its own program; results land in index order and the reduction in
    // assemble_fpt_result is a deterministic scan.
    const unsigned width = pool_width(config.threads);
    const UnfairnessMeasure measure = make_measure(config.measure, config.measure_absolute, ds,
                                                   fp.nf, fp.sm, config.envy_second_term);
    const AlphaGrid grid = build_grid(ds.n, config.grid_n);
    std::vector<FrontierPoint> points(grid.values.size());
    parallel_for_index(grid.values.size(), width, [&](std::size_t i) {
        MilpPolicyProgram local(config.policy, ds, config.solver);
        points[i] = max_weighted_welfare(fp.sm, grid.values[i], local);
    });
    FrontierConstraintSet fcs =
        assemble_frontier_constraints(std::move(points), config.resolve_lambda(ds.n), ds.n);

    std::vector<ProgramResult> sub(fcs.points.size());
    parallel_for_index(fcs.points.size(), width, [&](std::size_t j) {
        if (!fcs.points[j].usable()) return;
        MilpPolicyProgram local(config.policy, ds, config.solver);
        sub[j] = minimize_at_gridpoint(local, fcs, fp.sm, j, measure);
    });
    return assemble_fpt_result(ds, fp.nf, fp.sm, config, std::move(fcs), sub);
}

CompetitorResult ewm_policy(const Dataset& ds, const RunConfig& config,
                            std::optional<double> omega) {
    FittedPipeline fp = fit_pipeline(ds, config);
    MilpPolicyProgram prog(config.policy, ds, config.solver);
    return ewm_policy_over(prog, ds, fp.nf, fp.sm, config, omega);
}

CompetitorResult constrained_ewm(const Dataset& ds, const RunConfig& config, double kappa) {
    FittedPipeline fp = fit_pipeline(ds, config);
    MilpPolicyProgram prog(config.policy, ds, config.solver);
    return constrained_ewm_over(prog, ds, fp.nf, fp.sm, config, kappa);
}

std::string render_result(const FptResult& r) {
    std::ostringstream out;
    out << "[config]\n" << r.config_echo;
    out << "[policy]\n";
    if (r.policy.coefficients) {
        const RuleCoefficients& c = *r.policy.coefficients;
        out << "beta0 = " << fmt(c.beta0) << "\n";
        out << "beta1 = " << fmt(c.beta1) << "\n";
        out << "phi =";
        for (double v : c.phi) out << " " << fmt(v);
        out << "\n";
        out << "p1 = " << fmt(c.p1) << "\n";
        out << "p0 = " << fmt(c.p0) << "\n";
    }
    out << "[selection]\n";
    out << "chosen_alpha = " << fmt(r.chosen_alpha) << "\n";
    out << "objective_value = " << fmt(r.objective_value) << "\n";
    out << "lambda = " << fmt(r.frontier.lambda) << "\n";
    out << "[welfare]\n";
    out << "w0 = " << fmt(r.report.w0) << "\n";
    out << "w1 = " << fmt(r.report.w1) << "\n";
    out << "[unfairness]\n";
    out << "prediction_disparity = " << fmt(r.report.prediction_disparity) << "\n";
    out << "welfare_disparity = " << fmt(r.report.welfare_disparity) << "\n";
    out << "incentive = " << fmt(r.report.incentive) << "\n";
    out << "envy = " << fmt(r.report.envy) << "\n";
    if (r.report.predictive_parity) {
        out << "predictive_parity = " << fmt(*r.report.predictive_parity) << "\n";
    } else {
        out << "predictive_parity = skipped (" << r.report.parity_skip_reason << ")\n";
    }
    out << "[gridpoints]\n";
    out << "# alpha w_bar frontier_status subproblem_status unfairness\n";
    for (const GridpointDiagnostics& d : r.per_gridpoint) {
        out << fmt(d.alpha) << " " << fmt(d.w_bar) << " " << to_string(d.frontier_status) << " "
            << to_string(d.subproblem_status) << " " << fmt(d.unfairness) << "\n";
    }
    return out.str();
}

}  // namespace fairpol
