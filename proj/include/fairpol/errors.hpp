#pragma once
// Typed error hierarchy shared by all modules.
//
// Three broad families map onto the CLI exit codes: configuration problems
// (exit 2), data problems (exit 3), and solver problems (exit 4). Every
// concrete error carries a human-readable message naming the offending
// column/key/unit so failures are actionable from the command line.

#include <stdexcept>
#include <string>

namespace fairpol {

/// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Configuration problems: unknown keys, out-of-range values, bad flags.
struct ConfigError : Error {
    using Error::Error;
};

/// Data problems: malformed tables, invariant violations in the sample.
struct DataError : Error {
    using Error::Error;
};

/// Optimization problems: infeasible/unbounded programs, failed solves.
struct SolverError : Error {
    using Error::Error;
};

// --- data family -----------------------------------------------------------

struct MissingColumn : DataError {
    using DataError::DataError;
};
struct NonBinaryIndicator : DataError {
    using DataError::DataError;
};
/// A (group x arm) cell is empty: the overlap assumption fails in-sample.
struct EmptyCell : DataError {
    using DataError::DataError;
};
struct NonFiniteValue : DataError {
    using DataError::DataError;
};
/// Some (S,D) cell has fewer units than requested folds.
struct InfeasibleStratification : DataError {
    using DataError::DataError;
};

// --- estimation family -----------------------------------------------------

struct SingularSystem : DataError {
    using DataError::DataError;
};
struct NonConvergence : DataError {
    using DataError::DataError;
};

// --- measure family --------------------------------------------------------

/// Predictive parity is undefined when a group has no treated units.
struct ZeroTreatedGroup : DataError {
    using DataError::DataError;
};
/// Predictive parity is only defined for deterministic ({0,1}) policies.
struct NonDeterministicPolicy : DataError {
    using DataError::DataError;
};
/// A non-linear measure (predictive parity) was requested as an objective.
struct NonLinearObjective : ConfigError {
    using ConfigError::ConfigError;
};

// --- solver family ---------------------------------------------------------

struct InfeasibleProgram : SolverError {
    using SolverError::SolverError;
};
struct UnboundedProgram : SolverError {
    using SolverError::SolverError;
};
/// A big-M encoding was requested without a finite coefficient box.
struct UnboundedBox : ConfigError {
    using ConfigError::ConfigError;
};
/// No gridpoint of the frontier produced a usable optimum.
struct AllGridpointsFailed : SolverError {
    using SolverError::SolverError;
};
/// The fairness side constraint excludes every class member.
struct InfeasibleFairnessConstraint : SolverError {
    using SolverError::SolverError;
};

// --- simulation family -----------------------------------------------------

struct InvariantViolation : DataError {
    using DataError::DataError;
};

}  // namespace fairpol
