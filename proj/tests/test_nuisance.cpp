#include "doctest.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "fairpol/dataset.hpp"
#include "fairpol/nuisance.hpp"
#include "fairpol/rng.hpp"

using namespace fairpol;

namespace {

Dataset make_sample(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Dataset ds;
    ds.n = n;
    ds.p = 2;
    for (std::size_t i = 0; i < n; ++i) {
        const int s = rng.bernoulli(0.5);
        std::vector<double> x{rng.normal(), rng.normal()};
        const double e = 1.0 / (1.0 + std::exp(-(0.2 + 0.3 * x[0] - 0.2 * s)));
        const int d = rng.bernoulli(e);
        const double mean = 0.5 + 0.4 * x[0] - 0.3 * x[1] - 0.2 * s + d * (0.6 - 0.3 * s);
        ds.outcome.push_back(mean + rng.normal(0.0, 0.4));
        ds.treatment.push_back(d);
        ds.attribute.push_back(s);
        ds.covariates.push_back(x);
    }
    // Guarantee occupied cells regardless of the draw.
    for (int j = 0; j < 8; ++j) {
        ds.treatment[j] = j % 2;
        ds.attribute[j] = (j / 2) % 2;
    }
    return ds;
}

std::vector<double> propensity_basis(const Dataset& ds, std::size_t i) {
    std::vector<double> row{1.0};
    for (double x : ds.covariates[i]) row.push_back(x);
    row.push_back(static_cast<double>(ds.attribute[i]));
    return row;
}

}  // namespace

TEST_CASE("propensity predictions are out-of-fold and clipped") {
    Dataset ds = make_sample(100, 3u);
    FoldAssignment folds = split_folds(ds, 4, 17u);
    PropensityFit pf = estimate_propensity(ds, folds, 0.1, {0.05, 0.95});
    REQUIRE(pf.per_fold.size() == 4);
    REQUIRE(pf.ehat.size() == ds.n);
    for (std::size_t i = 0; i < ds.n; ++i) {
        CHECK(pf.ehat[i] >= 0.05);
        CHECK(pf.ehat[i] <= 0.95);
        // The cached value comes from the model trained without unit i's fold.
        const GlmFit& model = pf.per_fold[folds.fold_of[i] - 1];
        const double raw = model.predict(propensity_basis(ds, i));
        CHECK(pf.ehat[i] == doctest::Approx(std::clamp(raw, 0.05, 0.95)).epsilon(1e-12));
    }
}

TEST_CASE("outcome models never train on their own prediction fold") {
    Dataset ds = make_sample(100, 4u);
    FoldAssignment folds = split_folds(ds, 4, 18u);
    OutcomeFit base = estimate_outcome_means(ds, folds, 0.2, Pooling::Separate);

    // Perturbing outcomes of the units INSIDE fold 2 must not move any
    // fold-2 prediction: their models are trained on the complement.
    Dataset bent = ds;
    for (std::size_t i = 0; i < ds.n; ++i) {
        if (folds.fold_of[i] == 2) bent.outcome[i] += 5.0;
    }
    OutcomeFit moved = estimate_outcome_means(bent, folds, 0.2, Pooling::Separate);
    for (std::size_t i = 0; i < ds.n; ++i) {
        if (folds.fold_of[i] != 2) continue;
        for (int d = 0; d < 2; ++d) {
            for (int s = 0; s < 2; ++s) {
                CHECK(moved.mhat[i][d][s] ==
                      doctest::Approx(base.mhat[i][d][s]).epsilon(1e-12));
            }
        }
    }

    // Units outside fold 2 see retrained models, so their predictions move.
    double shift = 0.0;
    for (std::size_t i = 0; i < ds.n; ++i) {
        if (folds.fold_of[i] == 2) continue;
        shift += std::fabs(moved.mhat[i][0][0] - base.mhat[i][0][0]);
    }
    CHECK(shift > 0.1);
}

TEST_CASE("pooled outcome fits share one model across groups") {
    Dataset ds = make_sample(100, 5u);
    FoldAssignment folds = split_folds(ds, 4, 19u);
    OutcomeFit of = estimate_outcome_means(ds, folds, 0.2, Pooling::Pooled);
    CHECK(of.pooling == Pooling::Pooled);
    for (std::size_t i = 0; i < ds.n; ++i) {
        for (int d = 0; d < 2; ++d) {
            for (int s = 0; s < 2; ++s) {
                CHECK(std::isfinite(of.mhat[i][d][s]));
            }
        }
    }
    // Same stored fit at both attribute slots per fold and arm.
    for (int k = 0; k < folds.K; ++k) {
        for (int d = 0; d < 2; ++d) {
            CHECK(of.per_fold[k][d][0].coefficients == of.per_fold[k][d][1].coefficients);
        }
    }
}

TEST_CASE("scores follow the augmented inverse-propensity formula") {
    Dataset ds = make_sample(120, 6u);
    FoldAssignment folds = split_folds(ds, 5, 20u);
    NuisanceFit nf = fit_nuisance(ds, folds, 0.1, {0.01, 0.99}, Pooling::Separate);
    ScoreMatrix sm = compute_scores(ds, nf);

    REQUIRE(sm.n == ds.n);
    CHECK(sm.p_hat[0] == doctest::Approx(ds.group_share(0)).epsilon(1e-15));
    CHECK(sm.p_hat[1] == doctest::Approx(ds.group_share(1)).epsilon(1e-15));
    CHECK(sm.attribute == ds.attribute);

    for (std::size_t i = 0; i < ds.n; ++i) {
        const int si = ds.attribute[i];
        const double e = nf.propensity.ehat[i];
        const double y = ds.outcome[i];
        const double d = ds.treatment[i];
        for (int s = 0; s < 2; ++s) {
            if (s != si) {
                CHECK(sm.gamma[i][0][s] == 0.0);
                CHECK(sm.gamma[i][1][s] == 0.0);
                continue;
            }
            const double m1 = nf.outcome.mhat[i][1][s];
            const double m0 = nf.outcome.mhat[i][0][s];
            const double g1 = (d / e * (y - m1) + m1) / sm.p_hat[s];
            const double g0 = ((1.0 - d) / (1.0 - e) * (y - m0) + m0) / sm.p_hat[s];
            CHECK(sm.gamma[i][1][s] == doctest::Approx(g1).epsilon(1e-12));
            CHECK(sm.gamma[i][0][s] == doctest::Approx(g0).epsilon(1e-12));
            CHECK(sm.delta_welfare[i][s] ==
                  doctest::Approx(sm.gamma[i][1][s] - sm.gamma[i][0][s]).epsilon(1e-12));
        }
    }
}

TEST_CASE("welfare matches its linear-coefficient representation") {
    Dataset ds = make_sample(90, 7u);
    FoldAssignment folds = split_folds(ds, 4, 21u);
    NuisanceFit nf = fit_nuisance(ds, folds, 0.1, {0.01, 0.99}, Pooling::Separate);
    ScoreMatrix sm = compute_scores(ds, nf);

    Rng rng(55u);
    for (int t = 0; t < 10; ++t) {
        PolicyValues pv;
        for (std::size_t i = 0; i < ds.n; ++i) {
            pv.z0.push_back(rng.uniform());
            pv.z1.push_back(rng.uniform());
        }
        const auto [w0, w1] = empirical_welfare(sm, pv);

        // Direct summation from the score definition.
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < ds.n; ++i) {
            d0 += sm.delta_welfare[i][0] * pv.z0[i];
            d1 += sm.delta_welfare[i][1] * pv.z1[i];
        }
        d0 /= static_cast<double>(ds.n);
        d1 /= static_cast<double>(ds.n);
        CHECK(w0 == doctest::Approx(d0).epsilon(1e-12));
        CHECK(w1 == doctest::Approx(d1).epsilon(1e-12));

        // The functional form agrees with the direct evaluation.
        LinearFunctional f0 = welfare_functional(sm, 0);
        LinearFunctional f1 = welfare_functional(sm, 1);
        double v0 = f0.constant, v1 = f1.constant;
        for (std::size_t i = 0; i < ds.n; ++i) {
            v0 += f0.c0[i] * pv.z0[i] + f0.c1[i] * pv.z1[i];
            v1 += f1.c0[i] * pv.z0[i] + f1.c1[i] * pv.z1[i];
        }
        CHECK(v0 == doctest::Approx(w0).epsilon(1e-12));
        CHECK(v1 == doctest::Approx(w1).epsilon(1e-12));
    }
}

TEST_CASE("treat-everyone welfare equals the mean effect score per group") {
    Dataset ds = make_sample(80, 8u);
    FoldAssignment folds = split_folds(ds, 4, 22u);
    NuisanceFit nf = fit_nuisance(ds, folds, 0.1, {0.01, 0.99}, Pooling::Separate);
    ScoreMatrix sm = compute_scores(ds, nf);
    PolicyValues all = constant_policy(ds.n, 1.0);
    const auto [w0, w1] = empirical_welfare(sm, all);
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < ds.n; ++i) {
        m0 += sm.delta_welfare[i][0];
        m1 += sm.delta_welfare[i][1];
    }
    CHECK(w0 == doctest::Approx(m0 / static_cast<double>(ds.n)).epsilon(1e-12));
    CHECK(w1 == doctest::Approx(m1 / static_cast<double>(ds.n)).epsilon(1e-12));
}
