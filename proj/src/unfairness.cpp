#include "fairpol/unfairness.hpp"

#include <cmath>
#include <cstddef>

namespace fairpol {

std::string to_string(UnfairnessKind k) {
    switch (k) {
        case UnfairnessKind::PredictionDisparity: return "prediction_disparity";
        case UnfairnessKind::WelfareDisparity: return "welfare_disparity";
        case UnfairnessKind::IncentiveCompatibility: return "incentive";
        case UnfairnessKind::CounterfactualEnvy: return "envy";
        case UnfairnessKind::PredictiveParity: return "predictive_parity";
    }
    return "unknown";
}

UnfairnessKind unfairness_kind_from_string(const std::string& name) {
    if (name == "prediction_disparity") return UnfairnessKind::PredictionDisparity;
    if (name == "welfare_disparity") return UnfairnessKind::WelfareDisparity;
    if (name == "incentive") return UnfairnessKind::IncentiveCompatibility;
    if (name == "envy") return UnfairnessKind::CounterfactualEnvy;
    if (name == "predictive_parity") return UnfairnessKind::PredictiveParity;
    throw ConfigError("unknown unfairness measure '" + name +
                      "' (expected prediction_disparity, welfare_disparity, incentive, envy, "
                      "or predictive_parity)");
}

std::string to_string(EnvySecondTerm f) {
    return f == EnvySecondTerm::AsPrinted ? "as_printed" : "welfare_form";
}

EnvySecondTerm envy_second_term_from_string(const std::string& name) {
    if (name == "as_printed") return EnvySecondTerm::AsPrinted;
    if (name == "welfare_form") return EnvySecondTerm::WelfareForm;
    throw ConfigError("unknown envy_second_term '" + name +
                      "' (expected as_printed or welfare_form)");
}

double UnfairnessMeasure::evaluate(const PolicyValues& pv) const {
    if (!linear) {
        throw NonLinearObjective(
            "predictive parity has no linear coefficient representation; evaluate it via "
            "predictive_parity() instead");
    }
    if (coeffs.c0.size() != pv.n() || coeffs.c1.size() != pv.n()) {
        throw DataError("measure coefficients sized for " + std::to_string(coeffs.c0.size()) +
                        " units but policy has " + std::to_string(pv.n()));
    }
    double v = coeffs.constant;
    for (std::size_t i = 0; i < pv.n(); ++i) {
        v += coeffs.c0[i] * pv.z0[i] + coeffs.c1[i] * pv.z1[i];
    }
    return absolute ? std::fabs(v) : v;
}

double prediction_disparity(const PolicyValues& pv, const std::vector<int>& attribute,
                            double p_hat_1) {
    if (attribute.size() != pv.n()) {
        throw DataError("attribute vector and policy values have different lengths");
    }
    if (!(p_hat_1 > 0.0 && p_hat_1 < 1.0)) {
        throw DataError("prediction disparity needs a group share strictly inside (0,1), got " +
                        std::to_string(p_hat_1));
    }
    const double n = static_cast<double>(pv.n());
    double sum0 = 0.0;
    double sum1 = 0.0;
    for (std::size_t i = 0; i < pv.n(); ++i) {
        const double z = pv.own(i, attribute[i]);
        if (attribute[i] == 1) {
            sum1 += z;
        } else {
            sum0 += z;
        }
    }
    return sum0 / (n * (1.0 - p_hat_1)) - sum1 / (n * p_hat_1);
}

double welfare_disparity(const ScoreMatrix& sm, const PolicyValues& pv) {
    const auto [w0, w1] = empirical_welfare(sm, pv);
    return w0 - w1;
}

double incentive_compatibility(const ScoreMatrix& sm, const PolicyValues& pv) {
    if (sm.n != pv.n()) {
        throw DataError("score matrix and policy values have different lengths");
    }
    const double n = static_cast<double>(sm.n);
    const auto [w0, w1] = empirical_welfare(sm, pv);
    double total = 0.0;
    for (int s = 0; s < 2; ++s) {
        // Welfare group s would generate if every unit's attribute were
        // flipped inside the policy, minus its realized welfare.
        double flipped = 0.0;
        for (std::size_t i = 0; i < sm.n; ++i) {
            const double z_flip = (s == 1) ? pv.z0[i] : pv.z1[i];
            flipped += sm.delta_welfare[i][s] * z_flip;
        }
        flipped /= n;
        total += flipped - (s == 1 ? w1 : w0);
    }
    return total;
}

double counterfactual_envy(const NuisanceFit& nf, const ScoreMatrix& sm, const PolicyValues& pv,
                           EnvySecondTerm form) {
    if (sm.n != pv.n() || nf.outcome.mhat.size() != pv.n() || sm.attribute.size() != pv.n()) {
        throw DataError("nuisance fit, score matrix, and policy values must share one sample");
    }
    const double n = static_cast<double>(sm.n);
    double total = 0.0;
    for (int s = 0; s < 2; ++s) {
        const int sp = 1 - s;
        const double p_s = sm.p_hat[s];
        if (!(p_s > 0.0)) throw DataError("empty attribute group in envy evaluation");

        // Plug-in value of the policy for group s under the OTHER group's
        // outcome functions: m_{1,s'}(X_i) when treated, m_{0,s'}(X_i) when
        // not, averaged over group s.
        double cross = 0.0;
        for (std::size_t i = 0; i < sm.n; ++i) {
            if (sm.attribute[i] != s) continue;
            const double z = (s == 1) ? pv.z1[i] : pv.z0[i];
            cross += nf.outcome.mhat[i][1][sp] * z + nf.outcome.mhat[i][0][sp] * (1.0 - z);
        }
        cross /= n * p_s;

        // Subtracted term: either the printed form
        // (1/n) sum_i Gamma_{1,s,i} z - Gamma_{0,s,i} (1 - z), or the group
        // welfare (1/n) sum_i (Gamma_{1,s,i} - Gamma_{0,s,i}) z.
        double second = 0.0;
        for (std::size_t i = 0; i < sm.n; ++i) {
            const double z = (s == 1) ? pv.z1[i] : pv.z0[i];
            if (form == EnvySecondTerm::AsPrinted) {
                second += sm.gamma[i][1][s] * z - sm.gamma[i][0][s] * (1.0 - z);
            } else {
                second += sm.delta_welfare[i][s] * z;
            }
        }
        second /= n;

        total += cross - second;
    }
    return total;
}

double predictive_parity(const Dataset& ds, const NuisanceFit& nf, const PolicyValues& pv,
                         const std::optional<std::array<double, 2>>& group_treat_prob) {
    if (ds.n != pv.n() || nf.outcome.mhat.size() != ds.n ||
        nf.propensity.ehat.size() != ds.n) {
        throw DataError("dataset, nuisance fit, and policy values must share one sample");
    }
    const double n = static_cast<double>(ds.n);
    // Doubly-robust treated-outcome score without the group normalization:
    // (Y_i - m_1(X_i, S_i)) D_i / e(X_i, S_i) + m_1(X_i, S_i).
    std::array<double, 2> numer{0.0, 0.0};   // sum over group s of pi_i * score_i
    std::array<double, 2> treated{0.0, 0.0}; // sum over group s of pi_i
    for (std::size_t i = 0; i < ds.n; ++i) {
        const int s = ds.attribute[i];
        const double z = pv.own(i, s);
        if (std::fabs(z) > 1e-9 && std::fabs(z - 1.0) > 1e-9) {
            throw NonDeterministicPolicy(
                "predictive parity requires a deterministic policy; unit " + std::to_string(i) +
                " has treatment probability " + std::to_string(z));
        }
        const double m1 = nf.outcome.mhat[i][1][s];
        const double score =
            (ds.outcome[i] - m1) * ds.treatment[i] / nf.propensity.ehat[i] + m1;
        numer[s] += z * score;
        treated[s] += z;
    }
    std::array<double, 2> term{0.0, 0.0};
    for (int s = 0; s < 2; ++s) {
        const double p_s = ds.group_share(s);
        if (!(p_s > 0.0)) throw DataError("empty attribute group in predictive parity");
        if (group_treat_prob) {
            const double q = (*group_treat_prob)[s];
            if (!(q > 0.0)) {
                throw ZeroTreatedGroup("supplied treatment probability for group " +
                                       std::to_string(s) + " is not positive");
            }
            term[s] = numer[s] / (n * p_s * q);
        } else {
            if (treated[s] <= 0.0) {
                throw ZeroTreatedGroup("policy treats no unit of group " + std::to_string(s) +
                                       "; the sample treatment share is zero");
            }
            // Sample analog: q_s = treated_s / (n p_s), so the denominator
            // n p_s q_s collapses to the treated count.
            term[s] = numer[s] / treated[s];
        }
    }
    return std::fabs(term[1] - term[0]);
}

namespace {

LinearFunctional disparity_coeffs(const ScoreMatrix& sm) {
    LinearFunctional f = LinearFunctional::zeros(sm.n);
    const double n = static_cast<double>(sm.n);
    const double p1 = sm.p_hat[1];
    for (std::size_t i = 0; i < sm.n; ++i) {
        if (sm.attribute[i] == 1) {
            f.c1[i] = -1.0 / (n * p1);
        } else {
            f.c0[i] = 1.0 / (n * (1.0 - p1));
        }
    }
    return f;
}

LinearFunctional welfare_disparity_coeffs(const ScoreMatrix& sm) {
    LinearFunctional f = LinearFunctional::zeros(sm.n);
    const double inv_n = 1.0 / static_cast<double>(sm.n);
    for (std::size_t i = 0; i < sm.n; ++i) {
        f.c0[i] = sm.delta_welfare[i][0] * inv_n;
        f.c1[i] = -sm.delta_welfare[i][1] * inv_n;
    }
    return f;
}

LinearFunctional incentive_coeffs(const ScoreMatrix& sm) {
    LinearFunctional f = LinearFunctional::zeros(sm.n);
    const double inv_n = 1.0 / static_cast<double>(sm.n);
    for (std::size_t i = 0; i < sm.n; ++i) {
        // Group-1 units gain delta_1 under the flipped attribute (counted on
        // z0) and lose their realized welfare (on z1); symmetrically for
        // group 0. Off-group deltas are zero, so both lines are safe.
        f.c0[i] = (sm.delta_welfare[i][1] - sm.delta_welfare[i][0]) * inv_n;
        f.c1[i] = (sm.delta_welfare[i][0] - sm.delta_welfare[i][1]) * inv_n;
    }
    return f;
}

LinearFunctional envy_coeffs(const NuisanceFit& nf, const ScoreMatrix& sm,
                             EnvySecondTerm form) {
    LinearFunctional f = LinearFunctional::zeros(sm.n);
    const double inv_n = 1.0 / static_cast<double>(sm.n);
    for (int s = 0; s < 2; ++s) {
        const int sp = 1 - s;
        const double w_group = inv_n / sm.p_hat[s];
        std::vector<double>& c = (s == 1) ? f.c1 : f.c0;
        for (std::size_t i = 0; i < sm.n; ++i) {
            if (sm.attribute[i] == s) {
                c[i] += (nf.outcome.mhat[i][1][sp] - nf.outcome.mhat[i][0][sp]) * w_group;
                f.constant += nf.outcome.mhat[i][0][sp] * w_group;
            }
            if (form == EnvySecondTerm::AsPrinted) {
                c[i] -= (sm.gamma[i][1][s] + sm.gamma[i][0][s]) * inv_n;
                f.constant += sm.gamma[i][0][s] * inv_n;
            } else {
                c[i] -= sm.delta_welfare[i][s] * inv_n;
            }
        }
    }
    return f;
}

}  // namespace

UnfairnessMeasure make_measure(UnfairnessKind kind, bool absolute, const Dataset& ds,
                               const NuisanceFit& nf, const ScoreMatrix& sm,
                               EnvySecondTerm envy_form) {
    UnfairnessMeasure m;
    m.kind = kind;
    m.absolute = absolute;
    switch (kind) {
        case UnfairnessKind::PredictionDisparity:
            m.coeffs = disparity_coeffs(sm);
            break;
        case UnfairnessKind::WelfareDisparity:
            m.coeffs = welfare_disparity_coeffs(sm);
            break;
        case UnfairnessKind::IncentiveCompatibility:
            m.coeffs = incentive_coeffs(sm);
            break;
        case UnfairnessKind::CounterfactualEnvy:
            m.coeffs = envy_coeffs(nf, sm, envy_form);
            break;
        case UnfairnessKind::PredictiveParity:
            m.linear = false;
            break;
    }
    (void)ds;
    return m;
}

UnfairnessMeasure absolute_wrap(UnfairnessMeasure measure) {
    measure.absolute = true;
    return measure;
}

}  // namespace fairpol
