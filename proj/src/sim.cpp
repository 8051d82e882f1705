// Synthetic-experiment harness. The DGP lives on a finite covariate support,
// so every population quantity below is an exact weighted sum over at most
// (2 x support size) points — re-evaluations are bit-identical.

#include "fairpol/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <utility>

#include "fairpol/errors.hpp"
#include "fairpol/estimator.hpp"
#include "fairpol/rng.hpp"
#include "fairpol/threadpool.hpp"

namespace fairpol {
namespace {

std::vector<double> propensity_basis(const std::vector<double>& x, int s) {
    std::vector<double> row;
    row.reserve(x.size() + 2);
    row.push_back(1.0);
    row.insert(row.end(), x.begin(), x.end());
    row.push_back(static_cast<double>(s));
    return row;
}

std::vector<double> outcome_basis(const std::vector<double>& x) {
    std::vector<double> row;
    row.reserve(x.size() + 1);
    row.push_back(1.0);
    row.insert(row.end(), x.begin(), x.end());
    return row;
}

GlmFit frozen_model(Link link, std::vector<double> coefficients, const std::string& recipe) {
    GlmFit fit;
    fit.link = link;
    fit.coefficients = std::move(coefficients);
    fit.feature_recipe = recipe;
    fit.converged = true;
    return fit;
}

/// One categorical draw from normalized weights; consumes one uniform.
std::size_t draw_index(Rng& rng, const std::vector<double>& weight) {
    const double u = rng.uniform();
    double cum = 0.0;
    for (std::size_t k = 0; k < weight.size(); ++k) {
        cum += weight[k];
        if (u < cum) return k;
    }
    return weight.size() - 1;
}

}  // namespace

double Dgp::propensity_at(const std::vector<double>& x, int s) const {
    return propensity.predict(propensity_basis(x, s));
}

double Dgp::outcome_mean(int d, const std::vector<double>& x, int s) const {
    return outcome[d][s].predict(outcome_basis(x));
}

double Dgp::effect(const std::vector<double>& x, int s) const {
    return outcome_mean(1, x, s) - outcome_mean(0, x, s);
}

Dgp make_calibrated_dgp(const DgpSpec& spec, std::uint64_t seed) {
    if (spec.support_per_group < 1 || spec.covariate_dim < 1) {
        throw ConfigError("synthetic support needs at least one point and one covariate");
    }
    if (!(spec.p1 > 0.0 && spec.p1 < 1.0)) {
        throw ConfigError("group-1 probability must lie strictly between 0 and 1");
    }
    const std::size_t p = spec.covariate_dim;

    for (int attempt = 0; attempt < 100; ++attempt) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
        Dgp dgp;
        dgp.p1 = spec.p1;
        dgp.noise_sd = spec.noise_sd;

        for (int s = 0; s < 2; ++s) {
            auto& pts = dgp.support[s];
            auto& wts = dgp.weight[s];
            pts.assign(static_cast<std::size_t>(spec.support_per_group),
                       std::vector<double>(p));
            wts.assign(static_cast<std::size_t>(spec.support_per_group), 0.0);
            double total = 0.0;
            for (auto& point : pts) {
                for (double& coord : point) coord = rng.normal(spec.x_shift[s], 1.0);
            }
            for (double& w : wts) {
                w = rng.uniform(0.5, 1.5);
                total += w;
            }
            for (double& w : wts) w /= total;
        }

        std::vector<double> prop(p + 2);
        prop[0] = rng.uniform(-0.2, 0.2);
        for (std::size_t k = 0; k < p; ++k) {
            prop[k + 1] = rng.uniform(-spec.propensity_scale, spec.propensity_scale);
        }
        prop[p + 1] = rng.uniform(-spec.propensity_scale, spec.propensity_scale);
        dgp.propensity = frozen_model(Link::Logistic, prop, "1 + x + s");

        for (int s = 0; s < 2; ++s) {
            std::vector<double> control(p + 1);
            control[0] = spec.control_intercept[s];
            for (std::size_t k = 0; k < p; ++k) {
                control[k + 1] = rng.uniform(-spec.control_coef_scale, spec.control_coef_scale);
            }
            std::vector<double> treated = control;
            treated[0] += spec.effect_intercept[s];
            for (std::size_t k = 0; k < p; ++k) {
                treated[k + 1] += rng.uniform(-spec.effect_coef_scale, spec.effect_coef_scale);
            }
            dgp.outcome[0][s] = frozen_model(Link::Identity, control, "1 + x");
            dgp.outcome[1][s] = frozen_model(Link::Identity, treated, "1 + x");
        }

        bool overlap_ok = true;
        for (int s = 0; s < 2 && overlap_ok; ++s) {
            for (const auto& point : dgp.support[s]) {
                const double e = dgp.propensity_at(point, s);
                if (!(e > 0.05 && e < 0.95)) {
                    overlap_ok = false;
                    break;
                }
            }
        }
        if (overlap_ok) return dgp;
    }
    throw InvariantViolation(
        "could not draw propensities inside (0.05, 0.95) on the support in 100 attempts");
}

Dataset draw_sample(const Dgp& dgp, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw ConfigError("sample size must be positive");
    Rng rng(seed);
    Dataset ds;
    ds.n = n;
    ds.p = dgp.support[0].empty() ? 0 : dgp.support[0].front().size();
    ds.outcome.resize(n);
    ds.treatment.resize(n);
    ds.attribute.resize(n);
    ds.covariates.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int s = rng.bernoulli(dgp.p1);
        const std::size_t k = draw_index(rng, dgp.weight[s]);
        const std::vector<double>& x = dgp.support[s][k];
        const int d = rng.bernoulli(dgp.propensity_at(x, s));
        const double eps = rng.normal(0.0, dgp.noise_sd);
        ds.attribute[i] = s;
        ds.covariates[i] = x;
        ds.treatment[i] = d;
        ds.outcome[i] = dgp.outcome_mean(d, x, s) + eps;
    }
    return ds;
}

PopulationQuantities population_quantities(const Dgp& dgp, PolicyKind kind,
                                           const RuleCoefficients& coefficients,
                                           EnvySecondTerm envy_form) {
    // Every quantity below is group-conditional (an exact expectation given
    // S = s over that group's support), matching the sample estimators, whose
    // 1{S_i = s} / p_hat_s weighting makes them conditional means as well.
    std::array<double, 2> mean_own{0.0, 0.0};     // E_s[pi(X, s)]
    std::array<double, 2> welfare{0.0, 0.0};      // E_s[effect_s(X) pi(X, s)]
    std::array<double, 2> cross_welfare{0.0, 0.0};  // E_s[effect_s(X) pi(X, 1-s)]
    // Envy terms: menu value under the other group's outcome functions (own
    // policy, models at s' = 1-s) and the own as-printed second term.
    std::array<double, 2> menu_cross{0.0, 0.0};   // E_s[m_{1,s'} pi(.,s) + m_{0,s'}(1-pi(.,s))]
    std::array<double, 2> own_second{0.0, 0.0};

    for (int s = 0; s < 2; ++s) {
        const int sp = 1 - s;
        for (std::size_t k = 0; k < dgp.support[s].size(); ++k) {
            const std::vector<double>& x = dgp.support[s][k];
            const double w = dgp.weight[s][k];
            const double z_own = evaluate_rule(kind, coefficients, x, s);
            const double z_cross = evaluate_rule(kind, coefficients, x, sp);
            const double eff = dgp.effect(x, s);
            mean_own[s] += w * z_own;
            welfare[s] += w * eff * z_own;
            cross_welfare[s] += w * eff * z_cross;
            menu_cross[s] += w * (dgp.outcome_mean(1, x, sp) * z_own +
                                  dgp.outcome_mean(0, x, sp) * (1.0 - z_own));
            if (envy_form == EnvySecondTerm::AsPrinted) {
                own_second[s] += w * (dgp.outcome_mean(1, x, s) * z_own -
                                      dgp.outcome_mean(0, x, s) * (1.0 - z_own));
            } else {
                own_second[s] += w * eff * z_own;
            }
        }
    }

    PopulationQuantities q;
    q.w0 = welfare[0];
    q.w1 = welfare[1];
    q.prediction_disparity = mean_own[0] - mean_own[1];
    q.welfare_disparity = q.w0 - q.w1;
    q.incentive = (cross_welfare[0] - welfare[0]) +
                  (cross_welfare[1] - welfare[1]);
    q.envy = (menu_cross[1] - own_second[1]) +
             (menu_cross[0] - own_second[0]);
    return q;
}

double population_weighted_welfare(const Dgp& dgp, PolicyKind kind,
                                   const RuleCoefficients& coefficients, double alpha) {
    std::array<double, 2> welfare{0.0, 0.0};
    for (int s = 0; s < 2; ++s) {
        for (std::size_t k = 0; k < dgp.support[s].size(); ++k) {
            const std::vector<double>& x = dgp.support[s][k];
            welfare[s] += dgp.weight[s][k] * dgp.effect(x, s) *
                          evaluate_rule(kind, coefficients, x, s);
        }
    }
    return alpha * welfare[1] + (1.0 - alpha) * welfare[0];
}

std::vector<std::string> expand_methods(const RunConfig& config) {
    std::vector<std::string> out;
    for (const std::string& m : config.sim_methods) {
        if (m == "constrained_ewm") {
            for (double kappa : config.kappas) {
                char buf[64];
                std::snprintf(buf, sizeof(buf), "constrained_ewm(kappa=%g)", kappa);
                out.emplace_back(buf);
            }
        } else if (m == "fpt" || m == "ewm") {
            out.push_back(m);
        } else {
            throw ConfigError("unknown simulation method '" + m +
                              "' (expected fpt, ewm, constrained_ewm)");
        }
    }
    if (out.empty()) throw ConfigError("simulation needs at least one method");
    return out;
}

ReplicationSummary run_replications(const Dgp& dgp, std::size_t n, int R,
                                    const std::vector<std::string>& methods,
                                    const RunConfig& config, std::uint64_t seed) {
    if (R < 1) throw ConfigError("replication count must be at least 1");
    ReplicationSummary summary;
    summary.n = n;
    summary.replications = R;
    summary.seed = seed;
    summary.methods = methods;
    summary.records.assign(methods.size(),
                           std::vector<ReplicationRecord>(static_cast<std::size_t>(R)));
    summary.replication_ok.assign(static_cast<std::size_t>(R), 0);

    std::vector<std::string> errors(static_cast<std::size_t>(R));
    parallel_for_index(static_cast<std::size_t>(R),
                       config.threads <= 0 ? 0u : static_cast<unsigned>(config.threads),
                       [&](std::size_t r) {
        const std::uint64_t rep_seed = derive_seed(seed, r);
        try {
            Dataset ds = draw_sample(dgp, n, rep_seed);
            RunConfig rep_config = config;
            rep_config.seed = rep_seed;
            rep_config.threads = 1;  // the pool parallelism lives out here
            for (std::size_t m = 0; m < methods.size(); ++m) {
                const std::string& method = methods[m];
                PolicyValues policy;
                if (method == "fpt") {
                    policy = fair_policy_targeting(ds, rep_config).policy;
                } else if (method == "ewm") {
                    policy = ewm_policy(ds, rep_config).policy;
                } else {
                    double kappa = 0.0;
                    if (std::sscanf(method.c_str(), "constrained_ewm(kappa=%lf)", &kappa) != 1) {
                        throw ConfigError("unparseable method instance '" + method + "'");
                    }
                    policy = constrained_ewm(ds, rep_config, kappa).policy;
                }
                if (!policy.coefficients) {
                    throw InvariantViolation("estimated policy carries no coefficient rule");
                }
                ReplicationRecord rec;
                rec.coefficients = *policy.coefficients;
                rec.population = population_quantities(dgp, config.policy.kind,
                                                       rec.coefficients,
                                                       config.envy_second_term);
                summary.records[m][r] = std::move(rec);
            }
            summary.replication_ok[r] = 1;
        } catch (const std::exception& e) {
            errors[r] = e.what();
        }
    });

    for (std::size_t r = 0; r < static_cast<std::size_t>(R); ++r) {
        if (summary.replication_ok[r]) {
            ++summary.completed;
        } else {
            summary.failure_log.push_back("replication " + std::to_string(r) + ": " +
                                          errors[r]);
        }
    }
    const int failed = R - summary.completed;
    if (static_cast<double>(failed) > 0.05 * static_cast<double>(R)) {
        std::string detail = summary.failure_log.empty() ? "" : summary.failure_log.front();
        throw SolverError("too many failed replications (" + std::to_string(failed) + " of " +
                          std::to_string(R) + "); first failure: " + detail);
    }
    return summary;
}

std::vector<ReplicationSummary::Row> ReplicationSummary::table() const {
    static const char* kMetrics[] = {"w0", "w1", "c", "abs_c", "d", "i", "e"};
    std::vector<Row> rows;
    for (std::size_t m = 0; m < methods.size(); ++m) {
        for (const char* metric : kMetrics) {
            std::vector<double> values;
            values.reserve(static_cast<std::size_t>(completed));
            for (std::size_t r = 0; r < replication_ok.size(); ++r) {
                if (!replication_ok[r]) continue;
                const PopulationQuantities& q = records[m][r].population;
                double v = 0.0;
                const std::string name = metric;
                if (name == "w0") v = q.w0;
                else if (name == "w1") v = q.w1;
                else if (name == "c") v = q.prediction_disparity;
                else if (name == "abs_c") v = std::fabs(q.prediction_disparity);
                else if (name == "d") v = q.welfare_disparity;
                else if (name == "i") v = q.incentive;
                else v = q.envy;
                values.push_back(v);
            }
            Row row;
            row.method = methods[m];
            row.metric = metric;
            const double count = static_cast<double>(values.size());
            if (!values.empty()) {
                double sum = 0.0;
                for (double v : values) sum += v;
                row.mean = sum / count;
                double ss = 0.0;
                for (double v : values) ss += (v - row.mean) * (v - row.mean);
                row.se = values.size() > 1
                             ? std::sqrt(ss / (count - 1.0)) / std::sqrt(count)
                             : 0.0;
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_summary_csv(const ReplicationSummary& summary, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << "method,metric,mean,se,R,n\n";
    char buf[64];
    for (const ReplicationSummary::Row& row : summary.table()) {
        out << row.method << "," << row.metric << ",";
        std::snprintf(buf, sizeof(buf), "%.17g", row.mean);
        out << buf << ",";
        std::snprintf(buf, sizeof(buf), "%.17g", row.se);
        out << buf << "," << summary.completed << "," << summary.n << "\n";
    }
    if (!out) throw DataError("failed writing '" + path + "'");
}

}  // namespace fairpol
