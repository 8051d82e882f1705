#pragma once
// Independent brute-force references used by the tests. Everything here is
// computed from first definitions with plain loops — no code shared with the
// modules being checked — so agreement is evidence, not tautology.

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "fairpol/frontier.hpp"
#include "fairpol/nuisance.hpp"
#include "fairpol/policy.hpp"

namespace fairpol {

/// An explicit finite policy class for exhaustive scans.
struct FinitePolicySet {
    std::vector<PolicyValues> policies;
};

/// Indices (ascending, unique) of every policy that attains the maximal
/// alpha-weighted welfare for at least one gridpoint, within a lambda/sqrt(n)
/// slack. Welfares are recomputed here by direct summation.
std::vector<std::size_t> brute_force_frontier(const FinitePolicySet& fs, const ScoreMatrix& sm,
                                              const AlphaGrid& grid, double lambda = 0.0);

struct BruteForceFairest {
    std::size_t index = 0;   // into fs.policies
    double alpha = 0.0;      // active gridpoint weight
    double value = 0.0;      // measure at the winner
};

/// Fairest member of the brute-force frontier: per gridpoint, scan for the
/// minimal measure over the policies satisfying that gridpoint's constraint
/// (first strict improvement wins within a gridpoint); across gridpoints take
/// the smallest value, breaking ties within 1e-12 toward the largest alpha.
BruteForceFairest brute_force_fairest(const FinitePolicySet& fs, const ScoreMatrix& sm,
                                      const AlphaGrid& grid,
                                      const std::function<double(const PolicyValues&)>& measure,
                                      double lambda = 0.0);

/// Closed form for the two-constant-policies population: on the welfare
/// frontier line p0*b0 + p1*b1 = phi, the pair minimizing |tau1*b1 - tau0*b0|.
/// Interior solution b1 = (phi/p0) / (tau1/tau0 + p1/p0) when both resulting
/// coordinates lie in [0,1]; otherwise b1 = min(1, phi/p1) with b0 taken from
/// the line and clipped into [0,1]. Returns (b0, b1).
std::pair<double, double> example2_fairest(double tau0, double tau1, double p1, double phi);

/// Exact maximum of sum_i weight[i] * z_i over every labeling z achievable by
/// an affine threshold rule on (x_i[, s_i]) (treat iff index >= 0), found by
/// enumerating separating hyperplanes through point subsets. Exponential in
/// the feature count, exact for points in general position.
double max_score_by_enumeration(const std::vector<std::vector<double>>& x,
                                const std::vector<int>& s, bool use_attribute,
                                const std::vector<double>& weight);

}  // namespace fairpol
