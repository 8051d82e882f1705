#include "fairpol/nuisance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

namespace fairpol {

std::string to_string(Pooling p) {
    return p == Pooling::Separate ? "separate" : "pooled";
}

Pooling pooling_from_string(const std::string& name) {
    if (name == "separate") return Pooling::Separate;
    if (name == "pooled") return Pooling::Pooled;
    throw ConfigError("unknown pooling scheme '" + name +
                      "' (expected separate or pooled)");
}

namespace {

/// Basis row [1, x..] or [1, x.., s] or [1, x.., s, s*x..].
std::vector<double> basis_row(const std::vector<double>& x, bool with_s,
                              bool with_sx, int s) {
    std::vector<double> row;
    row.reserve(1 + x.size() * (with_sx ? 2 : 1) + (with_s ? 1 : 0));
    row.push_back(1.0);
    row.insert(row.end(), x.begin(), x.end());
    if (with_s) row.push_back(static_cast<double>(s));
    if (with_sx)
        for (double v : x) row.push_back(static_cast<double>(s) * v);
    return row;
}

void check_folds(const Dataset& ds, const FoldAssignment& folds) {
    if (folds.fold_of.size() != ds.n)
        throw DataError("fold assignment length does not match the sample");
    if (folds.K < 2) throw ConfigError("cross-fitting requires K >= 2 folds");
}

}  // namespace

PropensityFit estimate_propensity(const Dataset& ds, const FoldAssignment& folds,
                                  double ridge, std::pair<double, double> clip) {
    check_folds(ds, folds);
    if (!(clip.first > 0.0 && clip.second < 1.0 && clip.first < clip.second))
        throw ConfigError("clip interval must satisfy 0 < lo < hi < 1");

    PropensityFit pf;
    pf.clip = clip;
    pf.per_fold.reserve(folds.K);
    for (int k = 1; k <= folds.K; ++k) {
        std::vector<std::vector<double>> X;
        std::vector<double> y;
        for (std::size_t i = 0; i < ds.n; ++i) {
            if (folds.fold_of[i] == k) continue;
            X.push_back(basis_row(ds.covariates[i], true, false, ds.attribute[i]));
            y.push_back(static_cast<double>(ds.treatment[i]));
        }
        pf.per_fold.push_back(
            fit_glm(X, y, Link::Logistic, ridge, "1 + x + s"));
    }
    pf.ehat.resize(ds.n);
    for (std::size_t i = 0; i < ds.n; ++i) {
        const GlmFit& model = pf.per_fold[folds.fold_of[i] - 1];
        double e = model.predict(basis_row(ds.covariates[i], true, false, ds.attribute[i]));
        pf.ehat[i] = std::clamp(e, clip.first, clip.second);
    }
    return pf;
}

OutcomeFit estimate_outcome_means(const Dataset& ds, const FoldAssignment& folds,
                                  double ridge, Pooling pooling,
                                  bool s_interactions) {
    check_folds(ds, folds);
    OutcomeFit of;
    of.pooling = pooling;
    of.per_fold.resize(folds.K);

    for (int k = 1; k <= folds.K; ++k) {
        for (int d = 0; d <= 1; ++d) {
            if (pooling == Pooling::Separate) {
                for (int s = 0; s <= 1; ++s) {
                    std::vector<std::vector<double>> X;
                    std::vector<double> y;
                    for (std::size_t i = 0; i < ds.n; ++i) {
                        if (folds.fold_of[i] == k) continue;
                        if (ds.treatment[i] != d || ds.attribute[i] != s) continue;
                        X.push_back(basis_row(ds.covariates[i], false, false, s));
                        y.push_back(ds.outcome[i]);
                    }
                    of.per_fold[k - 1][d][s] =
                        fit_glm(X, y, Link::Identity, ridge, "1 + x");
                }
            } else {
                std::vector<std::vector<double>> X;
                std::vector<double> y;
                for (std::size_t i = 0; i < ds.n; ++i) {
                    if (folds.fold_of[i] == k) continue;
                    if (ds.treatment[i] != d) continue;
                    X.push_back(basis_row(ds.covariates[i], true, s_interactions,
                                          ds.attribute[i]));
                    y.push_back(ds.outcome[i]);
                }
                GlmFit fit = fit_glm(X, y, Link::Identity, ridge,
                                     s_interactions ? "1 + x + s + s:x" : "1 + x + s");
                of.per_fold[k - 1][d][0] = fit;
                of.per_fold[k - 1][d][1] = fit;
            }
        }
    }

    of.mhat.resize(ds.n);
    for (std::size_t i = 0; i < ds.n; ++i) {
        int k = folds.fold_of[i];
        for (int d = 0; d <= 1; ++d) {
            for (int s = 0; s <= 1; ++s) {
                const GlmFit& model = of.per_fold[k - 1][d][s];
                std::vector<double> row =
                    pooling == Pooling::Separate
                        ? basis_row(ds.covariates[i], false, false, s)
                        : basis_row(ds.covariates[i], true, s_interactions, s);
                of.mhat[i][d][s] = model.predict(row);
            }
        }
    }
    return of;
}

NuisanceFit fit_nuisance(const Dataset& ds, const FoldAssignment& folds,
                         double ridge, std::pair<double, double> clip,
                         Pooling pooling) {
    NuisanceFit nf;
    nf.folds = folds;
    nf.propensity = estimate_propensity(ds, folds, ridge, clip);
    nf.outcome = estimate_outcome_means(ds, folds, ridge, pooling);
    return nf;
}

ScoreMatrix compute_scores(const Dataset& ds, const NuisanceFit& nf) {
    if (nf.propensity.ehat.size() != ds.n || nf.outcome.mhat.size() != ds.n)
        throw DataError("nuisance fit does not cover the sample");

    ScoreMatrix sm;
    sm.n = ds.n;
    sm.p_hat[1] = ds.group_share(1);
    sm.p_hat[0] = 1.0 - sm.p_hat[1];
    sm.gamma.assign(ds.n, {{{0.0, 0.0}, {0.0, 0.0}}});
    sm.delta_welfare.assign(ds.n, {0.0, 0.0});
    sm.attribute = ds.attribute;

    for (std::size_t i = 0; i < ds.n; ++i) {
        const int s = ds.attribute[i];
        const double e = nf.propensity.ehat[i];
        const double y = ds.outcome[i];
        const double d = static_cast<double>(ds.treatment[i]);
        const double m1 = nf.outcome.mhat[i][1][s];
        const double m0 = nf.outcome.mhat[i][0][s];
        const double inv_ps = 1.0 / sm.p_hat[s];
        // Off-group entries (S_i != s) stay zero.
        sm.gamma[i][1][s] = inv_ps * (d / e * (y - m1) + m1);
        sm.gamma[i][0][s] = inv_ps * ((1.0 - d) / (1.0 - e) * (y - m0) + m0);
        for (int g = 0; g <= 1; ++g)
            sm.delta_welfare[i][g] = sm.gamma[i][1][g] - sm.gamma[i][0][g];
    }
    return sm;
}

std::pair<double, double> empirical_welfare(const ScoreMatrix& sm,
                                            const PolicyValues& pv) {
    if (pv.n() != sm.n) throw DataError("policy values do not match the sample size");
    double w0 = 0.0, w1 = 0.0;
    for (std::size_t i = 0; i < sm.n; ++i) {
        w0 += sm.delta_welfare[i][0] * pv.z0[i];
        w1 += sm.delta_welfare[i][1] * pv.z1[i];
    }
    const double inv_n = 1.0 / static_cast<double>(sm.n);
    return {w0 * inv_n, w1 * inv_n};
}

LinearFunctional welfare_functional(const ScoreMatrix& sm, int s) {
    LinearFunctional f = LinearFunctional::zeros(sm.n);
    const double inv_n = 1.0 / static_cast<double>(sm.n);
    for (std::size_t i = 0; i < sm.n; ++i) {
        if (s == 0)
            f.c0[i] = sm.delta_welfare[i][0] * inv_n;
        else
            f.c1[i] = sm.delta_welfare[i][1] * inv_n;
    }
    return f;
}

void write_scores_csv(const ScoreMatrix& sm, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write scores file: " + path);
    out << "i,s,d,gamma\n";
    for (std::size_t i = 0; i < sm.n; ++i)
        for (int s = 0; s <= 1; ++s)
            for (int d = 0; d <= 1; ++d)
                out << i << ',' << s << ',' << d << ',' << sm.gamma[i][d][s] << "\n";
}

}  // namespace fairpol
