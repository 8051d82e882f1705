#pragma once
// The fair-policy-targeting pipeline and its competitor estimators.
//
// Pipeline: nuisance fits -> doubly-robust scores -> alpha grid -> maximal
// weighted welfare Wbar_j per gridpoint -> for each j, minimize the
// configured unfairness measure subject to
//     alpha_j W1(pi) + (1 - alpha_j) W0(pi) >= Wbar_j - lambda / sqrt(n)
// over the encoded class -> keep the j-minimum. Ties across gridpoints are
// broken toward the largest alpha_j, favoring the disadvantaged group.
//
// Competitors: (weighted) empirical welfare maximization, and welfare
// maximization under a fairness cap V(pi) <= kappa / n.

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fairpol/config.hpp"
#include "fairpol/dataset.hpp"
#include "fairpol/frontier.hpp"
#include "fairpol/nuisance.hpp"
#include "fairpol/program.hpp"
#include "fairpol/unfairness.hpp"

namespace fairpol {

/// Every evaluable measure at one policy, plus its per-group welfare.
struct MeasureReport {
    double w0 = 0.0;
    double w1 = 0.0;
    double prediction_disparity = 0.0;
    double welfare_disparity = 0.0;
    double incentive = 0.0;
    double envy = 0.0;
    std::optional<double> predictive_parity;
    std::string parity_skip_reason;  // set when parity is not defined here
};

MeasureReport evaluate_policy(const Dataset& ds, const NuisanceFit& nf, const ScoreMatrix& sm,
                              const PolicyValues& pv,
                              EnvySecondTerm envy_form = EnvySecondTerm::AsPrinted);

/// Diagnostics of one gridpoint subproblem.
struct GridpointDiagnostics {
    double alpha = 0.0;
    double w_bar = std::numeric_limits<double>::quiet_NaN();
    SolveStatus frontier_status = SolveStatus::Infeasible;
    double frontier_gap = 0.0;
    SolveStatus subproblem_status = SolveStatus::Infeasible;
    double subproblem_gap = 0.0;
    double unfairness = std::numeric_limits<double>::quiet_NaN();
};

struct FptResult {
    PolicyValues policy;
    double chosen_alpha = 0.0;
    double objective_value = std::numeric_limits<double>::quiet_NaN();
    MeasureReport report;
    std::vector<GridpointDiagnostics> per_gridpoint;
    FrontierConstraintSet frontier;
    std::string config_echo;
};

struct CompetitorResult {
    PolicyValues policy;
    std::string kind;  // "ewm", "weighted(w)", "constrained(k)"
    double objective_value = std::numeric_limits<double>::quiet_NaN();
    MeasureReport report;
};

/// Core loops over an abstract program (exercised with both the MILP-backed
/// class and explicit finite classes).
FptResult fair_policy_targeting_over(PolicyProgram& prog, const Dataset& ds,
                                     const NuisanceFit& nf, const ScoreMatrix& sm,
                                     const RunConfig& config);
CompetitorResult ewm_policy_over(PolicyProgram& prog, const Dataset& ds, const NuisanceFit& nf,
                                 const ScoreMatrix& sm, const RunConfig& config,
                                 std::optional<double> omega);
CompetitorResult constrained_ewm_over(PolicyProgram& prog, const Dataset& ds,
                                      const NuisanceFit& nf, const ScoreMatrix& sm,
                                      const RunConfig& config, double kappa);

/// Config-driven entry points: fit nuisances, build the encoded class, run.
FptResult fair_policy_targeting(const Dataset& ds, const RunConfig& config);
CompetitorResult ewm_policy(const Dataset& ds, const RunConfig& config,
                            std::optional<double> omega = {});
CompetitorResult constrained_ewm(const Dataset& ds, const RunConfig& config, double kappa);

/// Serializes an FptResult as a stable-key-order text document.
std::string render_result(const FptResult& r);

}  // namespace fairpol
