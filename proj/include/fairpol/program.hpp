#pragma once
// A uniform optimize-over-a-policy-class surface used by the frontier, the
// fair-policy-targeting loop, and the competitor estimators.
//
// Two backends:
//   MilpPolicyProgram   solves over an encoded coefficient class via branch
//                       and bound; continuous columns pinned by an equality
//                       row (the linear-probability z's) are substituted out
//                       before solving, which shrinks those models from
//                       O(n) columns to O(p)
//   FinitePolicyProgram exhaustive scan over an explicit list of policies,
//                       used for small classes and oracle cross-checks
//
// Side constraints (frontier rows, welfare orderings, fairness caps) are
// pushed and popped stack-wise around solves.

#include <cstddef>
#include <memory>
#include <vector>

#include "fairpol/dataset.hpp"
#include "fairpol/encoding.hpp"
#include "fairpol/lp.hpp"
#include "fairpol/policy.hpp"

namespace fairpol {

struct ProgramResult {
    PolicyValues policy;
    /// Objective achieved, evaluated on the returned policy (for absolute
    /// objectives this is |f(policy)|).
    double value = std::numeric_limits<double>::quiet_NaN();
    SolveStatus status = SolveStatus::Infeasible;
    double bound = std::numeric_limits<double>::quiet_NaN();
    double gap = 0.0;
    long nodes = 0;

    bool feasible() const {
        return status == SolveStatus::Optimal || status == SolveStatus::Gap ||
               (status == SolveStatus::Timeout && !policy.z0.empty());
    }
};

class PolicyProgram {
  public:
    virtual ~PolicyProgram() = default;
    virtual std::size_t sample_size() const = 0;
    virtual void push_constraint(const LinearFunctional& f, Relation rel, double rhs) = 0;
    virtual void pop_constraint() = 0;
    virtual ProgramResult maximize(const LinearFunctional& f) = 0;
    /// Minimizes f (or |f| with the two-sided epigraph when absolute).
    virtual ProgramResult minimize(const LinearFunctional& f, bool absolute) = 0;
};

class MilpPolicyProgram final : public PolicyProgram {
  public:
    MilpPolicyProgram(PolicyClass pc, const Dataset& ds, SolverLimits limits);

    std::size_t sample_size() const override { return ds_->n; }
    void push_constraint(const LinearFunctional& f, Relation rel, double rhs) override;
    void pop_constraint() override;
    ProgramResult maximize(const LinearFunctional& f) override;
    ProgramResult minimize(const LinearFunctional& f, bool absolute) override;

  private:
    ProgramResult solve(const LinearFunctional& f, Sense sense, bool absolute);

    PolicyClass pc_;
    const Dataset* ds_;
    SolverLimits limits_;
    struct SideRow {
        LinearFunctional f;
        Relation rel;
        double rhs;
    };
    std::vector<SideRow> side_rows_;
};

class FinitePolicyProgram final : public PolicyProgram {
  public:
    /// Candidates must already satisfy the class's own restrictions.
    explicit FinitePolicyProgram(std::vector<PolicyValues> candidates);

    std::size_t sample_size() const override;
    void push_constraint(const LinearFunctional& f, Relation rel, double rhs) override;
    void pop_constraint() override;
    ProgramResult maximize(const LinearFunctional& f) override;
    ProgramResult minimize(const LinearFunctional& f, bool absolute) override;

    const std::vector<PolicyValues>& candidates() const { return candidates_; }

  private:
    ProgramResult scan(const LinearFunctional& f, bool maximize, bool absolute);

    std::vector<PolicyValues> candidates_;
    struct SideRow {
        LinearFunctional f;
        Relation rel;
        double rhs;
    };
    std::vector<SideRow> side_rows_;
};

/// Evaluates a linear functional at a policy.
double functional_value(const LinearFunctional& f, const PolicyValues& pv);

}  // namespace fairpol
