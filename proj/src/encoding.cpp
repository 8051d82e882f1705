#include "fairpol/encoding.hpp"

#include <cmath>
#include <map>

#include "fairpol/errors.hpp"

namespace fairpol {

std::vector<std::pair<int, double>> PolicyEncoding::functional_terms(
    const LinearFunctional& f, double* constant_out) const {
    if (f.c0.size() != n || f.c1.size() != n) {
        throw DataError("linear functional sized for " + std::to_string(f.c0.size()) +
                        " units but the encoding covers " + std::to_string(n));
    }
    std::map<int, double> acc;
    for (std::size_t i = 0; i < n; ++i) {
        if (f.c0[i] != 0.0) acc[z_col[0][i]] += f.c0[i];
        if (f.c1[i] != 0.0) acc[z_col[1][i]] += f.c1[i];
    }
    if (constant_out) *constant_out = f.constant;
    std::vector<std::pair<int, double>> terms;
    terms.reserve(acc.size());
    for (const auto& [col, c] : acc) {
        if (c != 0.0) terms.emplace_back(col, c);
    }
    return terms;
}

void PolicyEncoding::add_constraint(const LinearFunctional& f, Relation rel, double rhs) {
    double constant = 0.0;
    auto terms = functional_terms(f, &constant);
    model.add_row(std::move(terms), rel, rhs - constant);
}

void PolicyEncoding::set_objective(const LinearFunctional& f, Sense sense) {
    double constant = 0.0;
    auto terms = functional_terms(f, &constant);
    std::fill(model.objective.begin(), model.objective.end(), 0.0);
    for (const auto& [col, c] : terms) model.objective[col] = c;
    model.objective_constant = constant;
    model.sense = sense;
}

PolicyValues PolicyEncoding::decode(const std::vector<double>& values) const {
    if (values.size() != static_cast<std::size_t>(model.num_vars())) {
        throw SolverError("solver assignment does not match the encoded model");
    }
    PolicyValues pv;
    pv.z0.resize(n);
    pv.z1.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        pv.z0[i] = std::min(std::max(values[z_col[0][i]], 0.0), 1.0);
        pv.z1[i] = std::min(std::max(values[z_col[1][i]], 0.0), 1.0);
    }
    RuleCoefficients rc;
    rc.beta0 = values[beta0];
    rc.beta1 = use_attribute ? values[beta1] : 0.0;
    rc.phi.resize(p);
    for (std::size_t k = 0; k < p; ++k) rc.phi[k] = values[phi[k]];
    if (kind == PolicyKind::ProbabilisticTwoLevel) {
        rc.p1 = std::min(std::max(values[p1_var], 0.0), 1.0);
        rc.p0 = std::min(std::max(values[p0_var], 0.0), 1.0);
    } else if (kind == PolicyKind::DeterministicLinear) {
        rc.p1 = 1.0;
        rc.p0 = 0.0;
    }
    pv.coefficients = rc;
    return pv;
}

PolicyEncoding encode_policy_class(const PolicyClass& pc, const Dataset& ds) {
    const bool needs_big_m = pc.kind != PolicyKind::LinearProbability;
    if (!(std::isfinite(pc.coefficient_box) && pc.coefficient_box > 0.0)) {
        if (needs_big_m) {
            throw UnboundedBox("threshold rules need a finite positive coefficient box to "
                               "size their big-M constants");
        }
        if (!(pc.coefficient_box > 0.0)) {
            throw UnboundedBox("coefficient box must be positive");
        }
    }

    PolicyEncoding e;
    e.kind = pc.kind;
    e.use_attribute = pc.use_attribute;
    e.n = ds.n;
    e.p = ds.p;
    e.b_max = pc.coefficient_box;
    LpModel& m = e.model;
    m.sense = Sense::Maximize;

    const double box = pc.coefficient_box;
    const double lo = std::isfinite(box) ? -box : -kInf;
    const double hi = std::isfinite(box) ? box : kInf;
    e.beta0 = m.add_variable(lo, hi, 0.0);
    if (pc.use_attribute) e.beta1 = m.add_variable(lo, hi, 0.0);
    e.phi.resize(ds.p);
    for (std::size_t k = 0; k < ds.p; ++k) e.phi[k] = m.add_variable(lo, hi, 0.0);

    // Index v_{s,i} as model terms (beta0 + beta1 s + x_i . phi).
    auto index_terms = [&](std::size_t i, int s) {
        std::vector<std::pair<int, double>> t;
        t.reserve(ds.p + 2);
        t.emplace_back(e.beta0, 1.0);
        if (pc.use_attribute && s == 1) t.emplace_back(e.beta1, 1.0);
        for (std::size_t k = 0; k < ds.p; ++k) {
            if (ds.covariates[i][k] != 0.0) t.emplace_back(e.phi[k], ds.covariates[i][k]);
        }
        return t;
    };

    if (needs_big_m) {
        e.big_m.resize(ds.n);
        for (std::size_t i = 0; i < ds.n; ++i) {
            double s_abs = 1.0;
            for (std::size_t k = 0; k < ds.p; ++k) s_abs += std::fabs(ds.covariates[i][k]);
            e.big_m[i] = box * s_abs;
        }
    }

    // The attribute levels each unit's constraints are emitted at: blind
    // classes share one set of columns and rows across s.
    const int s_levels = pc.use_attribute ? 2 : 1;

    if (pc.kind == PolicyKind::ProbabilisticTwoLevel) {
        e.p1_var = m.add_variable(0.0, 1.0, 0.0);
        e.p0_var = m.add_variable(0.0, 1.0, 0.0);
        m.add_row({{e.p0_var, 1.0}, {e.p1_var, -1.0}}, Relation::LessEqual, 0.0);  // p0 <= p1
    }

    for (int s = 0; s < s_levels; ++s) {
        e.z_col[s].resize(ds.n);
        if (pc.kind == PolicyKind::ProbabilisticTwoLevel) e.xi_col[s].resize(ds.n);
        for (std::size_t i = 0; i < ds.n; ++i) {
            if (pc.kind == PolicyKind::DeterministicLinear) {
                const int z = m.add_variable(0.0, 1.0, 0.0, /*integral=*/true);
                e.z_col[s][i] = z;
                const double C = e.big_m[i];
                const double eps = 1e-6 * C;
                // v - C z <= -eps : z = 0 forces v below the hyperplane.
                auto t1 = index_terms(i, s);
                t1.emplace_back(z, -C);
                m.add_row(std::move(t1), Relation::LessEqual, -eps);
                // v - C z >= -C : z = 1 forces v on or above it.
                auto t2 = index_terms(i, s);
                t2.emplace_back(z, -C);
                m.add_row(std::move(t2), Relation::GreaterEqual, -C);
            } else if (pc.kind == PolicyKind::ProbabilisticTwoLevel) {
                const int xi = m.add_variable(0.0, 1.0, 0.0, /*integral=*/true);
                const int z = m.add_variable(0.0, 1.0, 0.0);
                e.xi_col[s][i] = xi;
                e.z_col[s][i] = z;
                const double C = e.big_m[i];
                const double eps = 1e-6 * C;
                auto t1 = index_terms(i, s);
                t1.emplace_back(xi, -C);
                m.add_row(std::move(t1), Relation::LessEqual, -eps);
                auto t2 = index_terms(i, s);
                t2.emplace_back(xi, -C);
                m.add_row(std::move(t2), Relation::GreaterEqual, -C);
                // McCormick linearization of z = p1 xi + p0 (1 - xi):
                m.add_row({{z, 1.0}, {e.p0_var, -1.0}, {xi, -1.0}}, Relation::LessEqual, 0.0);
                m.add_row({{z, 1.0}, {e.p1_var, -1.0}}, Relation::LessEqual, 0.0);
                m.add_row({{z, 1.0}, {e.p1_var, -1.0}, {xi, -1.0}}, Relation::GreaterEqual,
                          -1.0);
                m.add_row({{z, 1.0}, {e.p0_var, -1.0}}, Relation::GreaterEqual, 0.0);
            } else {
                // LinearProbability: z is the rule index itself, boxed into
                // [0,1] by its variable bounds.
                const int z = m.add_variable(0.0, 1.0, 0.0);
                e.z_col[s][i] = z;
                auto t = index_terms(i, s);
                t.emplace_back(z, -1.0);
                m.add_row(std::move(t), Relation::Equal, 0.0);
            }
        }
    }
    if (s_levels == 1) {
        e.z_col[1] = e.z_col[0];
        e.xi_col[1] = e.xi_col[0];
    }

    if (auto cap = pc.capacity_count(ds.n)) {
        LinearFunctional own = LinearFunctional::zeros(ds.n);
        for (std::size_t i = 0; i < ds.n; ++i) {
            (ds.attribute[i] == 1 ? own.c1[i] : own.c0[i]) = 1.0;
        }
        e.add_constraint(own, Relation::LessEqual, *cap);
    }
    for (const PolicyConstraint& extra : pc.extra_constraints) {
        e.add_constraint(extra.f, extra.rel, extra.rhs);
    }
    return e;
}

}  // namespace fairpol
