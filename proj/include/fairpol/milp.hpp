#pragma once
// Mixed-integer linear solving by best-first branch and bound on top of the
// simplex in lp.hpp. Nodes are ordered by their parent relaxation value, the
// branching variable is the most fractional integer variable, and each node
// re-solves its relaxation from scratch (no warm starts). Integrality is
// accepted within 1e-6; the relative gap reported on early stops is
// |objective - bound| / max(1, |bound|).

#include "fairpol/lp.hpp"

namespace fairpol {

/// Solves `model` honouring the integrality flags. Every integer variable
/// must carry finite bounds (UnboundedBox otherwise). Statuses: Optimal,
/// Gap (node limit or target gap reached with an incumbent), Infeasible,
/// Unbounded, Timeout.
MilpSolution solve_milp(const LpModel& model, const SolverLimits& limits = {});

}  // namespace fairpol
