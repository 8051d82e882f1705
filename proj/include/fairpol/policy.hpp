#pragma once
// Policy classes and policy values.
//
// A policy maps (x, s) to a treatment probability in [0,1]. Three functional
// forms are supported, all parameterized by a coefficient vector
// (beta0 intercept, beta1 attribute coefficient, phi covariate coefficients)
// with index v(x,s) = beta0 + beta1*s + x.phi:
//
//   DeterministicLinear    pi(x,s) = 1{v(x,s) >= 0}
//   ProbabilisticTwoLevel  pi(x,s) = p1 if v(x,s) >= 0 else p0,  0<=p0<=p1<=1
//   LinearProbability      pi(x,s) = v(x,s), constrained into [0,1] in-sample
//
// Attribute-blind classes pin beta1 = 0 (and then pi(x,0) = pi(x,1)).

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fairpol/dataset.hpp"

namespace fairpol {

enum class PolicyKind { DeterministicLinear, ProbabilisticTwoLevel, LinearProbability };

std::string to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& name);

/// A linear functional of in-sample policy values:
///   f(z) = sum_i c0[i]*z0[i] + sum_i c1[i]*z1[i] + constant
/// where z0[i] = pi(X_i, 0) and z1[i] = pi(X_i, 1). This is the common
/// currency between unfairness measures, frontier constraints, and the
/// optimizer's objective rows.
struct LinearFunctional {
    std::vector<double> c0;
    std::vector<double> c1;
    double constant = 0.0;

    static LinearFunctional zeros(std::size_t n) {
        LinearFunctional f;
        f.c0.assign(n, 0.0);
        f.c1.assign(n, 0.0);
        return f;
    }
    /// this += w * other (constants included).
    void add_scaled(const LinearFunctional& other, double w);
};

enum class Relation { LessEqual, GreaterEqual, Equal };

/// One linear inequality on in-sample policy values (e.g. a welfare-ordering
/// restriction appended to the class definition).
struct PolicyConstraint {
    LinearFunctional f;
    Relation rel = Relation::LessEqual;
    double rhs = 0.0;
};

/// Declarative description of the policy class Pi searched over.
struct PolicyClass {
    PolicyKind kind = PolicyKind::DeterministicLinear;
    /// Whether s enters the rule (beta1 free) or not (beta1 pinned to 0).
    bool use_attribute = true;
    /// Symmetric box: every coefficient lies in [-b_max, b_max]. Also sizes
    /// the big-M constants for threshold rules, so it must be finite there.
    double coefficient_box = 1.0;
    /// Optional cap on in-sample treated mass sum_i pi(X_i, S_i). Values <= 1
    /// are read as a fraction of n, values > 1 as a count.
    std::optional<double> capacity;
    /// Extra linear restrictions on in-sample policy values.
    std::vector<PolicyConstraint> extra_constraints;

    /// Resolved capacity as a count for a sample of size n (empty if unset).
    std::optional<double> capacity_count(std::size_t n) const;
};

/// Coefficients realizing a policy, when the policy came from a
/// coefficient-parameterized rule. p1/p0 are used by the two-level kind only.
struct RuleCoefficients {
    double beta0 = 0.0;
    double beta1 = 0.0;
    std::vector<double> phi;
    double p1 = 1.0;
    double p0 = 0.0;
};

/// In-sample policy values z_{s,i} = pi(X_i, s), at both attribute levels so
/// cross-attribute measures (incentive compatibility, envy) are evaluable.
struct PolicyValues {
    std::vector<double> z0;  // pi(X_i, 0)
    std::vector<double> z1;  // pi(X_i, 1)
    std::optional<RuleCoefficients> coefficients;

    std::size_t n() const { return z0.size(); }
    /// Policy value at each unit's own attribute.
    double own(std::size_t i, int s) const { return s == 1 ? z1[i] : z0[i]; }
};

/// Rule index v(x,s), shared by all three kinds.
double rule_index(const RuleCoefficients& c, const std::vector<double>& x, int s);

/// Evaluate a rule of the given kind at one point. LinearProbability values
/// are clamped into [0,1]: the class constraint enforces the range on the
/// estimation sample, and clamping totalizes the rule off-sample (population
/// evaluation in the simulation).
double evaluate_rule(PolicyKind kind, const RuleCoefficients& c,
                     const std::vector<double>& x, int s);

/// Evaluate a rule on a whole sample (both attribute levels).
PolicyValues policy_values_from_rule(PolicyKind kind, const RuleCoefficients& c,
                                     const Dataset& ds);

/// Constant policy pi == value at every unit and both attributes.
PolicyValues constant_policy(std::size_t n, double value);

}  // namespace fairpol
