#pragma once
// Empirical unfairness measures over in-sample policy values, each with a
// linear-in-policy coefficient representation where one exists.
//
// Measures (V-hat_n, group 1 = disadvantaged):
//   prediction disparity      C = sum pi(1-S)/(n(1-p1)) - sum pi S/(n p1)
//   welfare disparity         D = W_0(pi) - W_1(pi)
//   incentive compatibility   I = sum_s [ (1/n) sum_i delta_i,s pi(X_i,1-s) - W_s(pi) ]
//   counterfactual envy       E = A(1,0) + A(0,1), A built from cross-group
//                             outcome models and doubly-robust scores
//   predictive parity         |normalized DR sum, group 1 - group 0|,
//                             deterministic policies only, evaluation-only
//
// All but predictive parity are affine in (z0, z1) and expose coefficients a
// mixed-integer objective can consume directly. Signs are kept exactly as
// defined (C is group 0 minus group 1, D is W_0 - W_1); the `absolute` flag
// is how a planner who only cares about magnitude opts out of the sign.

#include <array>
#include <optional>
#include <string>

#include "fairpol/dataset.hpp"
#include "fairpol/errors.hpp"
#include "fairpol/nuisance.hpp"
#include "fairpol/policy.hpp"

namespace fairpol {

enum class UnfairnessKind {
    PredictionDisparity,
    WelfareDisparity,
    IncentiveCompatibility,
    CounterfactualEnvy,
    PredictiveParity,
};

std::string to_string(UnfairnessKind k);
UnfairnessKind unfairness_kind_from_string(const std::string& name);

/// Which second term the envy estimate uses. AsPrinted keeps
/// Gamma_1*z - Gamma_0*(1-z); WelfareForm uses (Gamma_1 - Gamma_0)*z, the
/// group welfare. They differ per unit by Gamma_0*(2z - 1), so the constant
/// coin-flip policy is the one place they agree exactly.
enum class EnvySecondTerm { AsPrinted, WelfareForm };

std::string to_string(EnvySecondTerm f);
EnvySecondTerm envy_second_term_from_string(const std::string& name);

/// A measure plus (for the linear kinds) coefficients such that
/// evaluate(pv) = <c0,z0> + <c1,z1> + constant, up to the absolute wrap.
struct UnfairnessMeasure {
    UnfairnessKind kind = UnfairnessKind::PredictionDisparity;
    bool absolute = false;
    bool linear = true;  // false only for PredictiveParity
    LinearFunctional coeffs;

    /// Evaluates via the stored coefficients (absolute wrap applied).
    /// Throws NonLinearObjective for the non-linear kind.
    double evaluate(const PolicyValues& pv) const;
};

/// Direct-definition evaluations (no coefficient machinery; used both as the
/// public API and as the cross-check for the coefficient representation).
double prediction_disparity(const PolicyValues& pv, const std::vector<int>& attribute,
                            double p_hat_1);
double welfare_disparity(const ScoreMatrix& sm, const PolicyValues& pv);
double incentive_compatibility(const ScoreMatrix& sm, const PolicyValues& pv);
double counterfactual_envy(const NuisanceFit& nf, const ScoreMatrix& sm, const PolicyValues& pv,
                           EnvySecondTerm form = EnvySecondTerm::AsPrinted);

/// Predictive parity for deterministic policies. group_treat_prob, indexed by
/// attribute, supplies P(pi = 1 | S = s) when known externally (census); when
/// absent the sample analog is used. Throws NonDeterministicPolicy for
/// fractional policies and ZeroTreatedGroup when a group has no treated unit
/// (or an externally supplied probability is zero).
double predictive_parity(const Dataset& ds, const NuisanceFit& nf, const PolicyValues& pv,
                         const std::optional<std::array<double, 2>>& group_treat_prob = {});

/// Builds the measure object, with coefficients for the linear kinds.
UnfairnessMeasure make_measure(UnfairnessKind kind, bool absolute, const Dataset& ds,
                               const NuisanceFit& nf, const ScoreMatrix& sm,
                               EnvySecondTerm envy_form = EnvySecondTerm::AsPrinted);

/// Same measure with the absolute wrap switched on.
UnfairnessMeasure absolute_wrap(UnfairnessMeasure measure);

}  // namespace fairpol
