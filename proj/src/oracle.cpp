// Brute-force references: exhaustive frontier membership and fairest-member
// scans on explicit policy lists, the two-constant-policies closed form, and
// an exact hyperplane-enumeration maximizer for threshold rules. Deliberately
// written with plain definition-level loops, independent of the production
// code paths they are used to check.

#include "fairpol/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "fairpol/errors.hpp"

namespace fairpol {
namespace {

/// Same feasibility slack the finite-class scanner grants, so membership
/// decisions agree on borderline arithmetic.
constexpr double kFeasTol = 1e-9;
/// Same cross-gridpoint tie window the estimator uses.
constexpr double kTieTol = 1e-12;

double direct_weighted_welfare(const ScoreMatrix& sm, const PolicyValues& pv, double alpha) {
    double w0 = 0.0;
    double w1 = 0.0;
    for (std::size_t i = 0; i < sm.n; ++i) {
        w0 += sm.delta_welfare[i][0] * pv.z0[i];
        w1 += sm.delta_welfare[i][1] * pv.z1[i];
    }
    const double n = static_cast<double>(sm.n);
    return alpha * (w1 / n) + (1.0 - alpha) * (w0 / n);
}

}  // namespace

std::vector<std::size_t> brute_force_frontier(const FinitePolicySet& fs, const ScoreMatrix& sm,
                                              const AlphaGrid& grid, double lambda) {
    if (fs.policies.empty()) throw InvariantViolation("finite policy set must be nonempty");
    const double slack = lambda / std::sqrt(static_cast<double>(sm.n));
    std::vector<char> member(fs.policies.size(), 0);
    std::vector<double> w(fs.policies.size());
    for (double alpha : grid.values) {
        double wbar = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < fs.policies.size(); ++i) {
            w[i] = direct_weighted_welfare(sm, fs.policies[i], alpha);
            wbar = std::max(wbar, w[i]);
        }
        for (std::size_t i = 0; i < fs.policies.size(); ++i) {
            if (w[i] >= wbar - slack - kFeasTol) member[i] = 1;
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < member.size(); ++i) {
        if (member[i]) out.push_back(i);
    }
    return out;
}

BruteForceFairest brute_force_fairest(const FinitePolicySet& fs, const ScoreMatrix& sm,
                                      const AlphaGrid& grid,
                                      const std::function<double(const PolicyValues&)>& measure,
                                      double lambda) {
    if (fs.policies.empty()) throw InvariantViolation("finite policy set must be nonempty");
    const double slack = lambda / std::sqrt(static_cast<double>(sm.n));

    struct PerGrid {
        std::size_t index = 0;
        double value = std::numeric_limits<double>::infinity();
    };
    std::vector<PerGrid> best(grid.values.size());
    for (std::size_t j = 0; j < grid.values.size(); ++j) {
        const double alpha = grid.values[j];
        double wbar = -std::numeric_limits<double>::infinity();
        std::vector<double> w(fs.policies.size());
        for (std::size_t i = 0; i < fs.policies.size(); ++i) {
            w[i] = direct_weighted_welfare(sm, fs.policies[i], alpha);
            wbar = std::max(wbar, w[i]);
        }
        for (std::size_t i = 0; i < fs.policies.size(); ++i) {
            if (w[i] < wbar - slack - kFeasTol) continue;
            const double v = measure(fs.policies[i]);
            if (v < best[j].value) best[j] = {i, v};  // first strict improvement wins
        }
    }

    double vmin = std::numeric_limits<double>::infinity();
    for (const PerGrid& b : best) vmin = std::min(vmin, b.value);
    std::size_t pick = 0;
    for (std::size_t j = 0; j < best.size(); ++j) {
        if (best[j].value <= vmin + kTieTol) pick = j;  // alphas ascend
    }
    return {best[pick].index, grid.values[pick], best[pick].value};
}

std::pair<double, double> example2_fairest(double tau0, double tau1, double p1, double phi) {
    const double p0 = 1.0 - p1;
    const double b1_interior = (phi / p0) / (tau1 / tau0 + p1 / p0);
    const double b0_interior = (phi - p1 * b1_interior) / p0;
    if (b1_interior >= 0.0 && b1_interior <= 1.0 && b0_interior >= 0.0 && b0_interior <= 1.0) {
        return {b0_interior, b1_interior};
    }
    const double b1 = std::min(1.0, phi / p1);
    const double b0 = std::clamp((phi - p1 * b1) / p0, 0.0, 1.0);
    return {b0, b1};
}

double max_score_by_enumeration(const std::vector<std::vector<double>>& x,
                                const std::vector<int>& s, bool use_attribute,
                                const std::vector<double>& weight) {
    const std::size_t n = x.size();
    if (n == 0 || s.size() != n || weight.size() != n) {
        throw InvariantViolation("enumeration oracle inputs must be nonempty and aligned");
    }
    const std::size_t p = x.front().size();
    const std::size_t m = p + (use_attribute ? 1 : 0);  // feature dimension

    std::vector<std::vector<double>> f(n, std::vector<double>(m));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < p; ++k) f[i][k] = x[i][k];
        if (use_attribute) f[i][p] = static_cast<double>(s[i]);
    }

    double best = -std::numeric_limits<double>::infinity();
    auto consider = [&](const std::vector<char>& z) {
        double score = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (z[i]) score += weight[i];
        }
        best = std::max(best, score);
    };

    // Constant rules (hyperplanes with every point strictly on one side).
    consider(std::vector<char>(n, 0));
    consider(std::vector<char>(n, 1));

    // Every hyperplane through m points, both orientations; points off the
    // plane classify by sign, and the m on-plane points range over all of
    // their 2^m assignments. The flips are justified by perturbing the plane,
    // which controls exactly m point values — so they are only taken when the
    // chosen subset is the WHOLE on-plane set. A plane holding extra points
    // (e.g. every attribute-coordinate plane contains one full group) keeps
    // just its as-labeled pattern; the neighboring strict patterns are
    // recovered from planes through m-point subsets they do determine.
    std::vector<std::size_t> subset(m);
    std::vector<char> z(n);
    std::vector<char> on_plane(n);
    std::function<void(std::size_t, std::size_t)> recurse = [&](std::size_t start,
                                                                std::size_t depth) {
        if (depth == m) {
            Eigen::MatrixXd a(m, m + 1);
            for (std::size_t r = 0; r < m; ++r) {
                for (std::size_t c = 0; c < m; ++c) a(static_cast<Eigen::Index>(r),
                                                      static_cast<Eigen::Index>(c)) =
                    f[subset[r]][c];
                a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(m)) = 1.0;
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
            if (lu.dimensionOfKernel() != 1) return;  // degenerate subset
            Eigen::VectorXd hk = lu.kernel().col(0);
            double hk_scale = std::fabs(hk(static_cast<Eigen::Index>(m)));
            for (std::size_t k = 0; k < m; ++k) {
                hk_scale = std::max(hk_scale, std::fabs(hk(static_cast<Eigen::Index>(k))));
            }

            std::size_t on_count = 0;
            for (int orient = 0; orient < 2; ++orient) {
                const double sign = orient == 0 ? 1.0 : -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    double v = hk(static_cast<Eigen::Index>(m));
                    double point_scale = 1.0;
                    for (std::size_t k = 0; k < m; ++k) {
                        v += hk(static_cast<Eigen::Index>(k)) * f[i][k];
                        point_scale += std::fabs(f[i][k]);
                    }
                    z[i] = sign * v >= 0.0 ? 1 : 0;
                    if (orient == 0) {
                        on_plane[i] = std::fabs(v) <= 1e-9 * hk_scale * point_scale ? 1 : 0;
                        if (on_plane[i]) ++on_count;
                    }
                }
                consider(z);
                if (on_count != m) continue;
                bool subset_is_plane = true;
                for (std::size_t r = 0; r < m; ++r) {
                    if (!on_plane[subset[r]]) subset_is_plane = false;
                }
                if (!subset_is_plane) continue;
                const std::size_t combos = std::size_t{1} << m;
                for (std::size_t mask = 0; mask < combos; ++mask) {
                    for (std::size_t r = 0; r < m; ++r) {
                        z[subset[r]] = (mask >> r) & 1u ? 1 : 0;
                    }
                    consider(z);
                }
            }
            return;
        }
        for (std::size_t i = start; i + (m - depth) <= n; ++i) {
            subset[depth] = i;
            recurse(i + 1, depth + 1);
        }
    };
    recurse(0, 0);
    return best;
}

}  // namespace fairpol
