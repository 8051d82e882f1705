#include "fairpol/program.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "fairpol/errors.hpp"
#include "fairpol/milp.hpp"

namespace fairpol {

double functional_value(const LinearFunctional& f, const PolicyValues& pv) {
    if (f.c0.size() != pv.n() || f.c1.size() != pv.n()) {
        throw DataError("functional and policy sized for different samples");
    }
    double v = f.constant;
    for (std::size_t i = 0; i < pv.n(); ++i) {
        v += f.c0[i] * pv.z0[i] + f.c1[i] * pv.z1[i];
    }
    return v;
}

namespace {

/// One eliminated column: original index and its defining affine expression
/// x = constant + sum (var, coeff) over surviving original indices.
struct Elimination {
    int var;
    double constant;
    std::vector<std::pair<int, double>> expr;
};

/// Substitutes out continuous variables that are pinned by a single equality
/// row with a +-1 coefficient (and appear in no other equality row). Their
/// bounds become inequality rows on the defining expression. Returns the
/// compacted model plus everything needed to reconstruct full assignments.
struct CompactedModel {
    LpModel model;
    std::vector<int> old_of_new;           // surviving columns, old index
    std::vector<int> new_of_old;           // -1 for eliminated columns
    std::vector<Elimination> eliminated;   // exprs in OLD indices

    std::vector<double> expand(const std::vector<double>& compact_values) const {
        std::vector<double> full(new_of_old.size(), 0.0);
        for (std::size_t j = 0; j < old_of_new.size(); ++j) {
            full[old_of_new[j]] = compact_values[j];
        }
        for (const Elimination& e : eliminated) {
            double v = e.constant;
            for (const auto& [var, c] : e.expr) v += c * full[var];
            full[e.var] = v;
        }
        return full;
    }
};

CompactedModel substitute_defined_columns(const LpModel& in) {
    const int n = in.num_vars();
    std::vector<int> eq_count(n, 0);
    for (const LpModel::Row& row : in.rows) {
        if (row.rel != Relation::Equal) continue;
        for (const auto& [j, a] : row.terms) {
            if (a != 0.0) ++eq_count[j];
        }
    }

    std::vector<char> drop_var(n, 0);
    std::vector<char> drop_row(in.rows.size(), 0);
    std::vector<Elimination> elims;
    for (std::size_t r = 0; r < in.rows.size(); ++r) {
        const LpModel::Row& row = in.rows[r];
        if (row.rel != Relation::Equal) continue;
        int pick = -1;
        double pick_coeff = 0.0;
        for (const auto& [j, a] : row.terms) {
            if (in.is_integer[j] || eq_count[j] != 1 || drop_var[j]) continue;
            if (a == 1.0 || a == -1.0) {
                pick = j;
                pick_coeff = a;
                break;
            }
        }
        if (pick < 0) continue;
        Elimination e;
        e.var = pick;
        e.constant = row.rhs / pick_coeff;
        for (const auto& [j, a] : row.terms) {
            if (j == pick || a == 0.0) continue;
            e.expr.emplace_back(j, -a / pick_coeff);
        }
        elims.push_back(std::move(e));
        drop_var[pick] = 1;
        drop_row[r] = 1;
    }

    CompactedModel out;
    out.eliminated = elims;
    out.new_of_old.assign(n, -1);
    for (int j = 0; j < n; ++j) {
        if (!drop_var[j]) {
            out.new_of_old[j] = static_cast<int>(out.old_of_new.size());
            out.old_of_new.push_back(j);
        }
    }
    if (elims.empty()) {
        out.model = in;
        return out;
    }

    // expr_of[old] points at the elimination for substituted columns.
    std::vector<const Elimination*> expr_of(n, nullptr);
    for (const Elimination& e : out.eliminated) expr_of[e.var] = &e;

    LpModel& m = out.model;
    m.sense = in.sense;
    m.objective_constant = in.objective_constant;
    for (int j : out.old_of_new) {
        m.add_variable(in.lower[j], in.upper[j], 0.0, in.is_integer[j] != 0);
    }

    // Rewrites terms over old indices into the compact space, distributing
    // eliminated columns through their defining expressions.
    auto rewrite = [&](const std::vector<std::pair<int, double>>& terms, double* constant) {
        std::map<int, double> acc;
        for (const auto& [j, c] : terms) {
            if (c == 0.0) continue;
            if (const Elimination* e = expr_of[j]) {
                *constant += c * e->constant;
                for (const auto& [k, ck] : e->expr) acc[out.new_of_old[k]] += c * ck;
            } else {
                acc[out.new_of_old[j]] += c;
            }
        }
        std::vector<std::pair<int, double>> result;
        result.reserve(acc.size());
        for (const auto& [j, c] : acc) {
            if (c != 0.0) result.emplace_back(j, c);
        }
        return result;
    };

    {
        std::vector<std::pair<int, double>> obj_terms;
        for (int j = 0; j < n; ++j) {
            if (in.objective[j] != 0.0) obj_terms.emplace_back(j, in.objective[j]);
        }
        double constant = 0.0;
        auto compact_obj = rewrite(obj_terms, &constant);
        m.objective_constant += constant;
        for (const auto& [j, c] : compact_obj) m.objective[j] = c;
    }
    for (std::size_t r = 0; r < in.rows.size(); ++r) {
        if (drop_row[r]) continue;
        const LpModel::Row& row = in.rows[r];
        double shift = 0.0;
        auto terms = rewrite(row.terms, &shift);
        m.add_row(std::move(terms), row.rel, row.rhs - shift);
    }
    // The eliminated columns' bounds survive as rows on their expressions.
    for (const Elimination& e : out.eliminated) {
        const double lo = in.lower[e.var];
        const double hi = in.upper[e.var];
        double shift = e.constant;
        auto terms = rewrite(e.expr, &shift);
        if (std::isfinite(lo)) m.add_row(terms, Relation::GreaterEqual, lo - shift);
        if (std::isfinite(hi)) m.add_row(std::move(terms), Relation::LessEqual, hi - shift);
    }
    return out;
}

}  // namespace

MilpPolicyProgram::MilpPolicyProgram(PolicyClass pc, const Dataset& ds, SolverLimits limits)
    : pc_(std::move(pc)), ds_(&ds), limits_(limits) {}

void MilpPolicyProgram::push_constraint(const LinearFunctional& f, Relation rel, double rhs) {
    side_rows_.push_back(SideRow{f, rel, rhs});
}

void MilpPolicyProgram::pop_constraint() {
    if (side_rows_.empty()) throw InvariantViolation("pop_constraint on an empty stack");
    side_rows_.pop_back();
}

ProgramResult MilpPolicyProgram::maximize(const LinearFunctional& f) {
    return solve(f, Sense::Maximize, false);
}

ProgramResult MilpPolicyProgram::minimize(const LinearFunctional& f, bool absolute) {
    return solve(f, Sense::Minimize, absolute);
}

ProgramResult MilpPolicyProgram::solve(const LinearFunctional& f, Sense sense, bool absolute) {
    PolicyEncoding enc = encode_policy_class(pc_, *ds_);
    for (const SideRow& row : side_rows_) enc.add_constraint(row.f, row.rel, row.rhs);

    if (!absolute) {
        enc.set_objective(f, sense);
    } else {
        if (sense != Sense::Minimize) {
            throw InvariantViolation("absolute objectives are only minimized");
        }
        // Two-sided epigraph: minimize t subject to -t <= f(z) <= t.
        double constant = 0.0;
        auto terms = enc.functional_terms(f, &constant);
        const int t = enc.model.add_variable(0.0, kInf, 0.0);
        auto upper = terms;
        upper.emplace_back(t, -1.0);
        enc.model.add_row(std::move(upper), Relation::LessEqual, -constant);
        auto lower = std::move(terms);
        lower.emplace_back(t, 1.0);
        enc.model.add_row(std::move(lower), Relation::GreaterEqual, -constant);
        std::fill(enc.model.objective.begin(), enc.model.objective.end(), 0.0);
        enc.model.objective[t] = 1.0;
        enc.model.objective_constant = 0.0;
        enc.model.sense = Sense::Minimize;
    }

    const CompactedModel compact = substitute_defined_columns(enc.model);
    MilpSolution sol = solve_milp(compact.model, limits_);

    ProgramResult out;
    out.status = sol.status;
    out.bound = sol.bound;
    out.gap = sol.gap;
    out.nodes = sol.nodes_explored;
    if (sol.has_solution()) {
        const std::vector<double> full = compact.expand(sol.values);
        out.policy = enc.decode(full);
        out.value = functional_value(f, out.policy);
        if (absolute) out.value = std::fabs(out.value);
    }
    return out;
}

FinitePolicyProgram::FinitePolicyProgram(std::vector<PolicyValues> candidates)
    : candidates_(std::move(candidates)) {
    // An empty candidate set is a legal (everywhere-infeasible) program; the
    // frontier layer turns it into its own no-optimal-gridpoint error.
    if (candidates_.empty()) return;
    const std::size_t n = candidates_.front().n();
    for (const PolicyValues& pv : candidates_) {
        if (pv.n() != n || pv.z1.size() != n) {
            throw DataError("finite policy candidates are sized inconsistently");
        }
    }
}

std::size_t FinitePolicyProgram::sample_size() const {
    return candidates_.empty() ? 0 : candidates_.front().n();
}

void FinitePolicyProgram::push_constraint(const LinearFunctional& f, Relation rel, double rhs) {
    side_rows_.push_back(SideRow{f, rel, rhs});
}

void FinitePolicyProgram::pop_constraint() {
    if (side_rows_.empty()) throw InvariantViolation("pop_constraint on an empty stack");
    side_rows_.pop_back();
}

ProgramResult FinitePolicyProgram::maximize(const LinearFunctional& f) {
    return scan(f, true, false);
}

ProgramResult FinitePolicyProgram::minimize(const LinearFunctional& f, bool absolute) {
    return scan(f, false, absolute);
}

ProgramResult FinitePolicyProgram::scan(const LinearFunctional& f, bool maximize, bool absolute) {
    constexpr double kFeasTol = 1e-9;
    ProgramResult out;
    out.status = SolveStatus::Infeasible;
    bool found = false;
    double best = 0.0;
    const PolicyValues* best_pv = nullptr;
    for (const PolicyValues& pv : candidates_) {
        bool ok = true;
        for (const SideRow& row : side_rows_) {
            const double v = functional_value(row.f, pv);
            if ((row.rel == Relation::LessEqual && v > row.rhs + kFeasTol) ||
                (row.rel == Relation::GreaterEqual && v < row.rhs - kFeasTol) ||
                (row.rel == Relation::Equal && std::fabs(v - row.rhs) > kFeasTol)) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        double v = functional_value(f, pv);
        if (absolute) v = std::fabs(v);
        if (!found || (maximize ? v > best : v < best)) {
            found = true;
            best = v;
            best_pv = &pv;
        }
    }
    if (found) {
        out.policy = *best_pv;
        out.value = best;
        out.bound = best;
        out.status = SolveStatus::Optimal;
    }
    return out;
}

}  // namespace fairpol
