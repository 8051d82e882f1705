#include "doctest.h"

#include <cmath>
#include <vector>

#include "fairpol/errors.hpp"
#include "fairpol/glm.hpp"
#include "fairpol/rng.hpp"

using namespace fairpol;

namespace {

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// Penalized objective evaluated from its definition (intercept unpenalized).
double objective(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                 Link link, double ridge, const std::vector<double>& b) {
    double j = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        double eta = 0.0;
        for (std::size_t k = 0; k < b.size(); ++k) eta += X[i][k] * b[k];
        if (link == Link::Identity) {
            const double r = y[i] - eta;
            j += r * r;
        } else {
            j += std::log1p(std::exp(eta)) - y[i] * eta;
        }
    }
    for (std::size_t k = 1; k < b.size(); ++k) j += ridge * b[k] * b[k];
    return j;
}

// Gradient of the same objective, written independently of the fitting code.
std::vector<double> gradient(const std::vector<std::vector<double>>& X,
                             const std::vector<double>& y, Link link, double ridge,
                             const std::vector<double>& b) {
    std::vector<double> g(b.size(), 0.0);
    for (std::size_t i = 0; i < X.size(); ++i) {
        double eta = 0.0;
        for (std::size_t k = 0; k < b.size(); ++k) eta += X[i][k] * b[k];
        const double resid =
            link == Link::Identity ? 2.0 * (eta - y[i]) : sigmoid(eta) - y[i];
        for (std::size_t k = 0; k < b.size(); ++k) g[k] += resid * X[i][k];
    }
    for (std::size_t k = 1; k < b.size(); ++k) g[k] += 2.0 * ridge * b[k];
    return g;
}

double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

struct Problem {
    std::vector<std::vector<double>> X;
    std::vector<double> y;
};

Problem random_problem(std::size_t n, std::size_t p, Link link, std::uint64_t seed) {
    Rng rng(seed);
    Problem pr;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row{1.0};
        for (std::size_t k = 0; k < p; ++k) row.push_back(rng.normal());
        double eta = 0.3;
        for (std::size_t k = 0; k < p; ++k) eta += (0.4 - 0.2 * k) * row[k + 1];
        pr.X.push_back(row);
        if (link == Link::Identity) {
            pr.y.push_back(eta + rng.normal(0.0, 0.5));
        } else {
            pr.y.push_back(static_cast<double>(rng.bernoulli(sigmoid(eta))));
        }
    }
    return pr;
}

}  // namespace

TEST_CASE("identity fit recovers an exact interpolation") {
    // Two points, one slope: the unpenalized least-squares line passes
    // through both.
    std::vector<std::vector<double>> X{{1.0, 0.0}, {1.0, 2.0}};
    std::vector<double> y{1.0, 5.0};
    GlmFit fit = fit_glm(X, y, Link::Identity, 0.0);
    CHECK(fit.coefficients[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.coefficients[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.predict({1.0, 3.0}) == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("identity fit is a stationary point of the penalized objective") {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        Problem pr = random_problem(40, 3, Link::Identity, seed);
        for (double ridge : {0.0, 0.5, 3.0}) {
            GlmFit fit = fit_glm(pr.X, pr.y, Link::Identity, ridge);
            CHECK(norm(gradient(pr.X, pr.y, Link::Identity, ridge, fit.coefficients)) <
                  1e-7);
            // Random perturbations never improve the objective.
            Rng rng(seed + 1000);
            const double at = objective(pr.X, pr.y, Link::Identity, ridge, fit.coefficients);
            for (int t = 0; t < 20; ++t) {
                std::vector<double> b = fit.coefficients;
                for (double& c : b) c += rng.normal(0.0, 0.05);
                CHECK(objective(pr.X, pr.y, Link::Identity, ridge, b) >= at - 1e-9);
            }
        }
    }
}

TEST_CASE("logistic fit drives the penalized gradient to zero") {
    for (std::uint64_t seed : {21u, 22u}) {
        Problem pr = random_problem(80, 2, Link::Logistic, seed);
        for (double ridge : {0.1, 1.0}) {
            GlmFit fit = fit_glm(pr.X, pr.y, Link::Logistic, ridge);
            CHECK(fit.converged);
            CHECK(norm(gradient(pr.X, pr.y, Link::Logistic, ridge, fit.coefficients)) <=
                  1e-6);
            for (const auto& row : pr.X) {
                const double p = fit.predict(row);
                CHECK(p > 0.0);
                CHECK(p < 1.0);
            }
        }
    }
}

TEST_CASE("ridge shrinks slopes toward zero but spares the intercept") {
    Problem pr = random_problem(60, 1, Link::Identity, 5u);
    GlmFit small = fit_glm(pr.X, pr.y, Link::Identity, 0.01);
    GlmFit large = fit_glm(pr.X, pr.y, Link::Identity, 1e7);
    CHECK(std::fabs(large.coefficients[1]) < std::fabs(small.coefficients[1]));
    CHECK(std::fabs(large.coefficients[1]) < 1e-4);
    // With the slope pinned at ~0 the intercept falls back to the mean.
    double mean = 0.0;
    for (double v : pr.y) mean += v;
    mean /= static_cast<double>(pr.y.size());
    CHECK(large.coefficients[0] == doctest::Approx(mean).epsilon(1e-3));
}

TEST_CASE("separable logistic data stays finite under a ridge penalty") {
    // Perfectly separated labels: unpenalized coefficients diverge, the
    // ridge term keeps the optimum finite and the solver converges.
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    for (int i = 0; i < 10; ++i) {
        X.push_back({1.0, static_cast<double>(i)});
        y.push_back(i < 5 ? 0.0 : 1.0);
    }
    GlmFit fit = fit_glm(X, y, Link::Logistic, 0.5);
    CHECK(fit.converged);
    CHECK(std::isfinite(fit.coefficients[0]));
    CHECK(std::isfinite(fit.coefficients[1]));
}

TEST_CASE("rank-deficient unpenalized identity designs are rejected") {
    // Second column duplicates the intercept.
    std::vector<std::vector<double>> X{{1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}};
    std::vector<double> y{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(fit_glm(X, y, Link::Identity, 0.0), SingularSystem);
    // Any positive ridge restores a unique optimum.
    CHECK_NOTHROW(fit_glm(X, y, Link::Identity, 0.1));
}

TEST_CASE("logistic iteration cap reports the achieved gradient norm") {
    Problem pr = random_problem(80, 2, Link::Logistic, 33u);
    CHECK_THROWS_AS(fit_glm(pr.X, pr.y, Link::Logistic, 0.1, "", 0), NonConvergence);
}

TEST_CASE("malformed fitting inputs are rejected") {
    std::vector<std::vector<double>> X{{1.0, 0.0}, {1.0}};
    std::vector<double> y{0.0, 1.0};
    CHECK_THROWS_AS(fit_glm(X, y, Link::Identity, 0.0), DataError);
    std::vector<std::vector<double>> one_row{{1.0, 0.0}};
    std::vector<double> one_y{0.5};
    CHECK_THROWS_AS(fit_glm(one_row, one_y, Link::Identity, 0.0), DataError);
    std::vector<std::vector<double>> ok{{1.0, 0.0}, {1.0, 1.0}};
    std::vector<double> bad_targets{0.5, 1.0};
    CHECK_THROWS_AS(fit_glm(ok, bad_targets, Link::Logistic, 0.1), DataError);
}
