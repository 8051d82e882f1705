#pragma once
// Ridge-penalized generalized linear models: the nuisance learners.
//
// Objective minimized by fit_glm over coefficients b (first basis column is
// the intercept by convention and is never penalized):
//
//   identity link:  J(b) = sum_i (y_i - x_i.b)^2        + ridge * |b_-0|^2
//   logistic link:  J(b) = sum_i [log(1+e^{x_i.b}) - y_i x_i.b] + ridge * |b_-0|^2
//
// Identity solves the normal equations directly; logistic runs damped Newton
// iterations to gradient norm <= tol (default 1e-8) or max_iter (default 500).

#include <string>
#include <vector>

#include "fairpol/errors.hpp"

namespace fairpol {

enum class Link { Identity, Logistic };

/// A fitted penalized GLM over an expanded feature basis.
struct GlmFit {
    Link link = Link::Identity;
    std::vector<double> coefficients;  // aligned with the basis columns
    double ridge_penalty = 0.0;
    /// Text description of the basis (e.g. "1 + x", "1 + x + s + s:x"),
    /// recorded by the caller that built the design matrix.
    std::string feature_recipe;
    bool converged = true;
    double gradient_norm = 0.0;
    int iterations = 0;

    /// Linear predictor x.b for one basis row.
    double linear_predictor(const std::vector<double>& basis_row) const;
    /// Mean prediction: x.b under identity, sigmoid(x.b) under logistic
    /// (always inside (0,1)).
    double predict(const std::vector<double>& basis_row) const;
};

/// Fits the penalized objective above. Preconditions: at least 2 rows, all
/// rows the same width, ridge >= 0; logistic requires targets in {0,1}.
/// Throws SingularSystem (identity link, ridge = 0, rank-deficient design)
/// and NonConvergence (logistic iteration cap hit; message carries the
/// achieved gradient norm).
GlmFit fit_glm(const std::vector<std::vector<double>>& features,
               const std::vector<double>& targets, Link link, double ridge,
               const std::string& feature_recipe = "", int max_iter = 500,
               double tol = 1e-8);

}  // namespace fairpol
