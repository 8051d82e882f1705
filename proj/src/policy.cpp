#include "fairpol/policy.hpp"

#include <algorithm>

namespace fairpol {

std::string to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::DeterministicLinear: return "deterministic_linear";
        case PolicyKind::ProbabilisticTwoLevel: return "probabilistic_two_level";
        case PolicyKind::LinearProbability: return "linear_probability";
    }
    return "?";
}

PolicyKind policy_kind_from_string(const std::string& name) {
    if (name == "deterministic_linear") return PolicyKind::DeterministicLinear;
    if (name == "probabilistic_two_level") return PolicyKind::ProbabilisticTwoLevel;
    if (name == "linear_probability") return PolicyKind::LinearProbability;
    throw ConfigError("unknown policy kind '" + name +
                      "' (expected deterministic_linear, probabilistic_two_level, "
                      "or linear_probability)");
}

void LinearFunctional::add_scaled(const LinearFunctional& other, double w) {
    if (c0.size() < other.c0.size()) c0.resize(other.c0.size(), 0.0);
    if (c1.size() < other.c1.size()) c1.resize(other.c1.size(), 0.0);
    for (std::size_t i = 0; i < other.c0.size(); ++i) c0[i] += w * other.c0[i];
    for (std::size_t i = 0; i < other.c1.size(); ++i) c1[i] += w * other.c1[i];
    constant += w * other.constant;
}

std::optional<double> PolicyClass::capacity_count(std::size_t n) const {
    if (!capacity) return std::nullopt;
    double c = *capacity;
    if (c <= 0.0) throw ConfigError("capacity must be positive");
    double count = c <= 1.0 ? c * static_cast<double>(n) : c;
    if (count > static_cast<double>(n))
        throw ConfigError("capacity exceeds the sample size");
    return count;
}

double rule_index(const RuleCoefficients& c, const std::vector<double>& x, int s) {
    double v = c.beta0 + c.beta1 * static_cast<double>(s);
    std::size_t k = std::min(c.phi.size(), x.size());
    for (std::size_t j = 0; j < k; ++j) v += c.phi[j] * x[j];
    return v;
}

double evaluate_rule(PolicyKind kind, const RuleCoefficients& c,
                     const std::vector<double>& x, int s) {
    double v = rule_index(c, x, s);
    switch (kind) {
        case PolicyKind::DeterministicLinear:
            return v >= 0.0 ? 1.0 : 0.0;
        case PolicyKind::ProbabilisticTwoLevel:
            return v >= 0.0 ? c.p1 : c.p0;
        case PolicyKind::LinearProbability:
            return std::clamp(v, 0.0, 1.0);
    }
    return 0.0;
}

PolicyValues policy_values_from_rule(PolicyKind kind, const RuleCoefficients& c,
                                     const Dataset& ds) {
    PolicyValues pv;
    pv.z0.resize(ds.n);
    pv.z1.resize(ds.n);
    for (std::size_t i = 0; i < ds.n; ++i) {
        pv.z0[i] = evaluate_rule(kind, c, ds.covariates[i], 0);
        pv.z1[i] = evaluate_rule(kind, c, ds.covariates[i], 1);
    }
    pv.coefficients = c;
    return pv;
}

PolicyValues constant_policy(std::size_t n, double value) {
    PolicyValues pv;
    pv.z0.assign(n, value);
    pv.z1.assign(n, value);
    return pv;
}

}  // namespace fairpol
