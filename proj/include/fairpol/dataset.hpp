#pragma once
// Observed-data model: the i.i.d. tuples (Y_i, D_i, S_i, X_i), input
// validation, stratified cross-fitting folds, and the CSV schema.
//
// Conventions fixed here and used everywhere downstream:
//   * S_i = 1 marks the disadvantaged group (documented, never inferred).
//   * D_i = 1 marks the treated arm.
//   * CSV schema: header `y,d,s,x1,...,xp`, UTF-8, decimal point.

#include <cstdint>
#include <string>
#include <vector>

#include "fairpol/errors.hpp"

namespace fairpol {

/// A parsed tabular record set: named columns of doubles. Produced by
/// read_csv_table or built directly in tests.
struct RawTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;  // each row has columns.size() cells
};

/// The observed sample. Immutable after construction; shared read-only.
struct Dataset {
    std::vector<double> outcome;    // Y_i
    std::vector<int> treatment;     // D_i in {0,1}
    std::vector<int> attribute;     // S_i in {0,1}, 1 = disadvantaged group
    std::vector<std::vector<double>> covariates;  // n rows of p values
    std::size_t n = 0;
    std::size_t p = 0;

    /// Count of units with S_i = s and D_i = d.
    std::size_t cell_count(int s, int d) const;
    /// Sample share of group s.
    double group_share(int s) const;
};

/// Unit -> fold map for K-fold cross-fitting, stratified on (S, D) so every
/// fold's training complement contains all four group x arm cells.
struct FoldAssignment {
    std::vector<int> fold_of;  // values in {1..K}
    int K = 0;
};

/// Checks the tabular input against the data-model invariants and builds a
/// Dataset.
///
/// Required columns: y, d, s, x1..xp (any order, p >= 1, no duplicates, no
/// extras). Throws MissingColumn, NonBinaryIndicator (d or s outside {0,1}),
/// EmptyCell (an attribute-group x treatment-arm cell is empty, i.e. overlap
/// fails in-sample), NonFiniteValue.
Dataset validate_dataset(const RawTable& raw);

/// Stratified random partition into K folds, deterministic given seed.
/// Each (S,D) cell is shuffled and dealt round-robin, so every fold receives
/// at least one unit from every cell. Throws InfeasibleStratification when a
/// cell has fewer than K units.
FoldAssignment split_folds(const Dataset& ds, int K, std::uint64_t seed);

/// CSV input: parses the `y,d,s,x1,...,xp` schema. Throws DataError on
/// malformed files and NonFiniteValue on unparseable numeric cells.
RawTable read_csv_table(const std::string& path);

/// CSV output, shortest round-trip number formatting: writing then reading a
/// Dataset reproduces every finite value bit-identically.
void write_csv(const Dataset& ds, const std::string& path);

/// Convenience: read + validate.
Dataset read_dataset(const std::string& path);

}  // namespace fairpol
