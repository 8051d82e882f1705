#pragma once
// Calibrated-experiment harness: a synthetic data-generating process over a
// finite covariate support (so population welfare and unfairness are exact
// weighted sums, not Monte-Carlo estimates), i.i.d. sample drawing, and a
// replication loop that scores estimated policies against the truth.
//
// The DGP's coefficients are drawn from the spec below and frozen — a
// structural stand-in (finite-support resampling, logistic propensities,
// linear outcome means), not a reproduction of any particular dataset.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairpol/config.hpp"
#include "fairpol/dataset.hpp"
#include "fairpol/glm.hpp"
#include "fairpol/policy.hpp"

namespace fairpol {

/// Construction recipe for make_calibrated_dgp. Group 1 is built to be the
/// disadvantaged group: lower baseline outcomes and smaller average
/// treatment effects, so welfare maximization alone tilts treatment toward
/// group 0 and the fairness machinery has something to correct.
struct DgpSpec {
    int support_per_group = 40;
    std::size_t covariate_dim = 2;
    double p1 = 0.5;  // P(S = 1)
    double noise_sd = 1.0;
    /// Group-wise location shift of the covariate cloud.
    std::array<double, 2> x_shift{0.0, 0.4};
    /// Control-arm mean: intercept per group, slopes ~ U(-scale, scale).
    std::array<double, 2> control_intercept{0.2, -0.2};
    double control_coef_scale = 0.5;
    /// Treatment effect: intercept per group, slopes ~ U(-scale, scale).
    std::array<double, 2> effect_intercept{0.35, 0.15};
    double effect_coef_scale = 0.4;
    /// Logistic propensity slopes ~ U(-scale, scale).
    double propensity_scale = 0.4;
};

struct Dgp {
    double p1 = 0.5;
    /// Finite covariate support per group with sampling weights (sum to 1).
    std::array<std::vector<std::vector<double>>, 2> support;
    std::array<std::vector<double>, 2> weight;
    GlmFit propensity;                             // e(x, s); basis (1, x..., s)
    std::array<std::array<GlmFit, 2>, 2> outcome;  // outcome[d][s] = m_{d,s}; basis (1, x...)
    double noise_sd = 1.0;

    double propensity_at(const std::vector<double>& x, int s) const;
    double outcome_mean(int d, const std::vector<double>& x, int s) const;
    /// Treatment effect m_{1,s}(x) - m_{0,s}(x).
    double effect(const std::vector<double>& x, int s) const;
};

/// Draws a DGP deterministically from the spec. Propensities are required to
/// stay inside (0.05, 0.95) on the whole support: violating draws are
/// redrawn up to 100 times before InvariantViolation.
Dgp make_calibrated_dgp(const DgpSpec& spec, std::uint64_t seed);

/// n i.i.d. draws: S ~ Bern(p1), X resampled from the group's support,
/// D | X,S ~ Bern(e(X,S)), Y = m_{D,S}(X) + Normal(0, noise_sd).
Dataset draw_sample(const Dgp& dgp, std::size_t n, std::uint64_t seed);

/// Exact population welfare and unfairness of a coefficient rule, computed by
/// weighted summation over the finite support (no sampling error).
struct PopulationQuantities {
    double w0 = 0.0;
    double w1 = 0.0;
    double prediction_disparity = 0.0;
    double welfare_disparity = 0.0;
    double incentive = 0.0;
    double envy = 0.0;
};

PopulationQuantities population_quantities(const Dgp& dgp, PolicyKind kind,
                                           const RuleCoefficients& coefficients,
                                           EnvySecondTerm envy_form = EnvySecondTerm::AsPrinted);

/// Exact population alpha-weighted welfare of a coefficient rule.
double population_weighted_welfare(const Dgp& dgp, PolicyKind kind,
                                   const RuleCoefficients& coefficients, double alpha);

/// One scored method within one replication.
struct ReplicationRecord {
    PopulationQuantities population;
    RuleCoefficients coefficients;
};

struct ReplicationSummary {
    std::size_t n = 0;
    int replications = 0;  // requested
    int completed = 0;     // replications where every method succeeded
    std::uint64_t seed = 0;
    std::vector<std::string> methods;  // instance labels, e.g. "constrained_ewm(kappa=1)"
    /// records[m][r] is valid where replication_ok[r] (kept per replication
    /// for paired comparisons).
    std::vector<std::vector<ReplicationRecord>> records;
    std::vector<char> replication_ok;
    std::vector<std::string> failure_log;

    struct Row {
        std::string method;
        std::string metric;
        double mean = 0.0;
        double se = 0.0;
    };
    /// Mean and standard error per (method, metric) over completed
    /// replications; metrics in fixed order (w0, w1, c, abs_c, d, i, e).
    std::vector<Row> table() const;
};

/// Expands configured method names into instance labels, one per kappa for
/// the constrained estimator.
std::vector<std::string> expand_methods(const RunConfig& config);

/// Draw-fit-score loop. Per-replication seeds derive from the master seed, so
/// the summary is deterministic for any thread count. A replication fails as
/// a whole if any method fails on it; more than 5% failures aborts.
ReplicationSummary run_replications(const Dgp& dgp, std::size_t n, int R,
                                    const std::vector<std::string>& methods,
                                    const RunConfig& config, std::uint64_t seed);

/// CSV with columns method, metric, mean, se, R, n.
void write_summary_csv(const ReplicationSummary& summary, const std::string& path);

}  // namespace fairpol
