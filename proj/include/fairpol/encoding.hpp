#pragma once
// Mixed-integer encodings of the three policy classes.
//
// Every encoding exposes the same surface: model variables for the rule
// coefficients (beta0, optionally beta1, phi), per-unit policy values z, and
// whatever auxiliaries the kind needs (threshold indicators xi and levels
// p1 >= p0 for the probabilistic rule). Linear functionals of in-sample
// policy values map onto model columns, so welfare objectives, unfairness
// objectives, capacity, and frontier constraints are all added the same way.
//
//   DeterministicLinear   binary z, big-M sandwich
//                           v_i - C_i z <= -eps,  v_i - C_i z >= -C_i
//                         with C_i = B(1 + sum_k |x_ik|), eps = 1e-6 C_i;
//                         units exactly on the hyperplane may label either way
//   ProbabilisticTwoLevel binary xi with the same sandwich, decision levels
//                         p0 <= p1 in [0,1], and z = p1 xi + p0 (1 - xi)
//                         linearized by McCormick rows
//   LinearProbability     continuous z tied to the rule index by an equality
//                         row, z in [0,1], no integer variables
//
// Attribute-blind classes allocate no beta1 column and share one z column
// across both attribute levels.

#include <array>
#include <cstddef>
#include <vector>

#include "fairpol/dataset.hpp"
#include "fairpol/lp.hpp"
#include "fairpol/policy.hpp"

namespace fairpol {

struct PolicyEncoding {
    LpModel model;  // objective left at zero until set_objective
    PolicyKind kind = PolicyKind::DeterministicLinear;
    bool use_attribute = true;
    std::size_t n = 0;
    std::size_t p = 0;
    double b_max = 1.0;
    std::vector<double> big_m;  // per-unit C_i (threshold kinds only)

    int beta0 = -1;
    int beta1 = -1;  // -1 when the class is attribute-blind
    std::vector<int> phi;
    int p1_var = -1;  // two-level kind only
    int p0_var = -1;
    /// z_col[s][i]; the same column appears at both s for blind classes.
    std::array<std::vector<int>, 2> z_col;
    /// xi_col[s][i]; threshold indicators of the two-level kind.
    std::array<std::vector<int>, 2> xi_col;

    /// Model terms realizing <c0,z0> + <c1,z1>; the functional's constant is
    /// written to *constant_out (shared z columns merge their coefficients).
    std::vector<std::pair<int, double>> functional_terms(const LinearFunctional& f,
                                                         double* constant_out) const;
    /// Appends `f rel rhs` (the functional's constant folded into the rhs).
    void add_constraint(const LinearFunctional& f, Relation rel, double rhs);
    /// Installs `f` as the model objective.
    void set_objective(const LinearFunctional& f, Sense sense);
    /// Reads a solver assignment back into policy values + rule coefficients.
    PolicyValues decode(const std::vector<double>& values) const;
};

/// Builds the encoding for one policy class over one sample. Threshold kinds
/// require a finite positive coefficient box (UnboundedBox otherwise);
/// capacity and extra class constraints are appended here.
PolicyEncoding encode_policy_class(const PolicyClass& pc, const Dataset& ds);

}  // namespace fairpol
