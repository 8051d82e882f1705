#include "fairpol/glm.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace fairpol {

namespace {

double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    double e = std::exp(t);
    return e / (1.0 + e);
}

/// log(1 + exp(t)) without overflow.
double softplus(double t) {
    if (t > 0.0) return t + std::log1p(std::exp(-t));
    return std::log1p(std::exp(t));
}

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto p = static_cast<Eigen::Index>(rows.empty() ? 0 : rows.front().size());
    Eigen::MatrixXd X(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(rows[i].size()) != p)
            throw DataError("ragged feature matrix: row widths differ");
        for (Eigen::Index j = 0; j < p; ++j) X(i, j) = rows[i][j];
    }
    return X;
}

double penalized_nll(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& b, double ridge) {
    double nll = 0.0;
    Eigen::VectorXd eta = X * b;
    for (Eigen::Index i = 0; i < y.size(); ++i)
        nll += softplus(eta[i]) - y[i] * eta[i];
    double pen = 0.0;
    for (Eigen::Index j = 1; j < b.size(); ++j) pen += b[j] * b[j];
    return nll + ridge * pen;
}

}  // namespace

double GlmFit::linear_predictor(const std::vector<double>& basis_row) const {
    double v = 0.0;
    std::size_t k = std::min(basis_row.size(), coefficients.size());
    for (std::size_t j = 0; j < k; ++j) v += coefficients[j] * basis_row[j];
    return v;
}

double GlmFit::predict(const std::vector<double>& basis_row) const {
    double eta = linear_predictor(basis_row);
    return link == Link::Logistic ? sigmoid(eta) : eta;
}

GlmFit fit_glm(const std::vector<std::vector<double>>& features,
               const std::vector<double>& targets, Link link, double ridge,
               const std::string& feature_recipe, int max_iter, double tol) {
    if (features.size() < 2)
        throw DataError("fit_glm needs at least 2 rows, got " +
                        std::to_string(features.size()));
    if (features.size() != targets.size())
        throw DataError("fit_glm: feature rows and targets differ in length");
    if (ridge < 0.0) throw ConfigError("ridge penalty must be nonnegative");

    Eigen::MatrixXd X = to_matrix(features);
    Eigen::VectorXd y(static_cast<Eigen::Index>(targets.size()));
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = targets[i];
    const Eigen::Index p = X.cols();
    if (p == 0) throw DataError("fit_glm: empty feature basis");

    // Penalty matrix: identity with the intercept (column 0) zeroed.
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(p, p);
    P(0, 0) = 0.0;

    GlmFit fit;
    fit.link = link;
    fit.ridge_penalty = ridge;
    fit.feature_recipe = feature_recipe;

    if (link == Link::Identity) {
        // Normal equations of the penalized least-squares objective:
        //   (X'X + ridge*P) b = X'y.
        Eigen::MatrixXd A = X.transpose() * X + ridge * P;
        Eigen::VectorXd rhs = X.transpose() * y;
        Eigen::VectorXd b;
        if (ridge > 0.0) {
            b = A.llt().solve(rhs);
        } else {
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
            if (qr.rank() < p)
                throw SingularSystem(
                    "identity-link design is rank-deficient and ridge = 0");
            b = qr.solve(y);
        }
        fit.coefficients.assign(b.data(), b.data() + p);
        fit.gradient_norm = (X.transpose() * (X * b - y) * 2.0 + 2.0 * ridge * (P * b)).norm();
        fit.iterations = 1;
        return fit;
    }

    // Logistic link: damped Newton on the penalized negative log-likelihood.
    for (double t : targets)
        if (t != 0.0 && t != 1.0)
            throw DataError("logistic link requires binary targets");

    Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
    double obj = penalized_nll(X, y, b, ridge);
    int iter = 0;
    double grad_norm = 0.0;
    for (; iter < max_iter; ++iter) {
        Eigen::VectorXd eta = X * b;
        Eigen::VectorXd mu(eta.size()), w(eta.size());
        for (Eigen::Index i = 0; i < eta.size(); ++i) {
            mu[i] = sigmoid(eta[i]);
            w[i] = mu[i] * (1.0 - mu[i]);
        }
        Eigen::VectorXd grad = X.transpose() * (mu - y) + 2.0 * ridge * (P * b);
        grad_norm = grad.norm();
        if (grad_norm <= tol) break;
        // Hessian X'WX + 2*ridge*P; a tiny diagonal floor keeps the solve
        // well-posed when ridge = 0 and some weights vanish.
        Eigen::MatrixXd H = X.transpose() * w.asDiagonal() * X + 2.0 * ridge * P;
        H.diagonal().array() += 1e-12;
        Eigen::VectorXd step = H.llt().solve(grad);
        double scale = 1.0;
        bool improved = false;
        for (int backtrack = 0; backtrack < 40; ++backtrack) {
            Eigen::VectorXd cand = b - scale * step;
            double cand_obj = penalized_nll(X, y, cand, ridge);
            // Rounding-level increases are accepted so the last Newton steps
            // can polish the gradient instead of stalling one ulp short.
            if (cand_obj <= obj + 1e-14 * (1.0 + std::fabs(obj))) {
                b = cand;
                obj = cand_obj;
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if (!improved) break;  // stalled: gradient check below decides
    }
    {
        Eigen::VectorXd eta = X * b;
        Eigen::VectorXd mu(eta.size());
        for (Eigen::Index i = 0; i < eta.size(); ++i) mu[i] = sigmoid(eta[i]);
        grad_norm = (X.transpose() * (mu - y) + 2.0 * ridge * (P * b)).norm();
    }
    fit.iterations = iter;
    fit.gradient_norm = grad_norm;
    fit.converged = grad_norm <= tol;
    if (!fit.converged)
        throw NonConvergence("logistic fit did not reach gradient norm " +
                             std::to_string(tol) + " in " + std::to_string(max_iter) +
                             " iterations (achieved " + std::to_string(grad_norm) + ")");
    fit.coefficients.assign(b.data(), b.data() + p);
    return fit;
}

}  // namespace fairpol
