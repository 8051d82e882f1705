#pragma once
// Cross-fitted nuisance estimation and doubly-robust scores.
//
// For each unit, the propensity e(X_i, S_i) and conditional means
// m_{d,s}(X_i) are predicted by models trained WITHOUT unit i's fold. The
// per-unit score for assigning arm d within group s is the AIPW form
//
//   G_{1,s,i} = 1{S_i=s}/p_s * [ D_i /   e(X_i,S_i)   * (Y_i - m_{1,s}(X_i)) + m_{1,s}(X_i) ]
//   G_{0,s,i} = 1{S_i=s}/p_s * [(1-D_i)/(1-e(X_i,S_i))* (Y_i - m_{0,s}(X_i)) + m_{0,s}(X_i) ]
//
// (arm-specific denominators: e for the treated arm, 1-e for control; this is
// what makes the score unbiased for welfare when either nuisance is correct).
// Group-s empirical welfare of a policy with in-sample values z is then
//
//   W_s(pi) = (1/n) sum_i (G_{1,s,i} - G_{0,s,i}) * z_{s,i}.

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "fairpol/dataset.hpp"
#include "fairpol/glm.hpp"
#include "fairpol/policy.hpp"

namespace fairpol {

/// Cross-fitting scheme for the outcome means. `Separate` trains m_{d,s} on
/// group-s rows only; `Pooled` trains on both groups with the attribute (and
/// attribute interactions) in the basis, so group contrasts share strength.
enum class Pooling { Separate, Pooled };

std::string to_string(Pooling p);
Pooling pooling_from_string(const std::string& name);

/// Per-fold propensity models plus cached out-of-fold clipped predictions.
struct PropensityFit {
    std::vector<GlmFit> per_fold;       // K logistic models for e(x,s)
    std::vector<double> ehat;           // clipped e(X_i, S_i), out-of-fold
    std::pair<double, double> clip{0.01, 0.99};
};

/// Per-fold outcome models m_{d,s} plus cached out-of-fold predictions at
/// BOTH attribute levels (cross-attribute prediction is needed by the envy
/// measure and by pooled scoring).
struct OutcomeFit {
    /// models[k][d][s]; under Pooled the same fit is stored at s=0 and s=1.
    std::vector<std::array<std::array<GlmFit, 2>, 2>> per_fold;
    /// mhat[i][d][s] = m_{d,s}(X_i) from unit i's out-of-fold model.
    std::vector<std::array<std::array<double, 2>, 2>> mhat;
    Pooling pooling = Pooling::Separate;
};

/// Everything the score matrix and the measures need about the nuisances.
struct NuisanceFit {
    PropensityFit propensity;
    OutcomeFit outcome;
    FoldAssignment folds;
};

/// n x 2 x 2 doubly-robust scores plus group shares.
struct ScoreMatrix {
    /// gamma[i][d][s]; zero whenever S_i != s.
    std::vector<std::array<std::array<double, 2>, 2>> gamma;
    std::array<double, 2> p_hat{0.0, 0.0};
    /// delta_welfare[i][s] = gamma[i][1][s] - gamma[i][0][s].
    std::vector<std::array<double, 2>> delta_welfare;
    /// S_i, carried along so measures need no separate dataset handle.
    std::vector<int> attribute;
    std::size_t n = 0;
};

/// Fits the logistic propensity per fold (basis: intercept + covariates + s)
/// and caches clipped out-of-fold predictions. clip defaults to (0.01, 0.99).
PropensityFit estimate_propensity(const Dataset& ds, const FoldAssignment& folds,
                                  double ridge,
                                  std::pair<double, double> clip = {0.01, 0.99});

/// Fits identity-link outcome means per fold and treatment arm. `Separate`
/// restricts each fit to its group's rows (basis: intercept + covariates);
/// `Pooled` fits both groups per arm with s and s-interactions in the basis
/// (s_interactions = false drops the interactions; used for misspecification
/// comparisons).
OutcomeFit estimate_outcome_means(const Dataset& ds, const FoldAssignment& folds,
                                  double ridge, Pooling pooling,
                                  bool s_interactions = true);

/// Convenience bundle of the two fits above.
NuisanceFit fit_nuisance(const Dataset& ds, const FoldAssignment& folds,
                         double ridge, std::pair<double, double> clip,
                         Pooling pooling);

/// Assembles the AIPW score matrix from cached out-of-fold predictions.
ScoreMatrix compute_scores(const Dataset& ds, const NuisanceFit& nf);

/// (W_0, W_1): per-group empirical welfare of the policy values.
std::pair<double, double> empirical_welfare(const ScoreMatrix& sm,
                                            const PolicyValues& pv);

/// Coefficients of W_s as a linear functional of policy values (used to build
/// optimizer rows): c_{s,i} = delta_welfare[i][s] / n on z_s, zero elsewhere.
LinearFunctional welfare_functional(const ScoreMatrix& sm, int s);

/// Debug export, one row per (i, s, d) with the score value.
void write_scores_csv(const ScoreMatrix& sm, const std::string& path);

}  // namespace fairpol
