#include "fairpol/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fairpol/rng.hpp"

namespace fairpol {

std::size_t Dataset::cell_count(int s, int d) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (attribute[i] == s && treatment[i] == d) ++c;
    return c;
}

double Dataset::group_share(int s) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (attribute[i] == s) ++c;
    return static_cast<double>(c) / static_cast<double>(n);
}

namespace {

bool is_binary(double v) { return v == 0.0 || v == 1.0; }

}  // namespace

Dataset validate_dataset(const RawTable& raw) {
    // Resolve the schema by name so column order in the file is free.
    const auto& cols = raw.columns;
    auto find_col = [&](const std::string& name) -> int {
        for (std::size_t j = 0; j < cols.size(); ++j)
            if (cols[j] == name) return static_cast<int>(j);
        return -1;
    };

    int yi = find_col("y");
    int di = find_col("d");
    int si = find_col("s");
    if (yi < 0) throw MissingColumn("missing required column 'y'");
    if (di < 0) throw MissingColumn("missing required column 'd'");
    if (si < 0) throw MissingColumn("missing required column 's'");

    // Covariates must be exactly x1..xp for some p >= 1.
    std::size_t p = cols.size() >= 3 ? cols.size() - 3 : 0;
    if (p < 1) throw MissingColumn("need at least one covariate column x1");
    std::vector<int> xcols(p, -1);
    for (std::size_t k = 1; k <= p; ++k) {
        int idx = find_col("x" + std::to_string(k));
        if (idx < 0)
            throw MissingColumn("missing covariate column x" + std::to_string(k) +
                                " (columns must be y,d,s,x1..xp)");
        xcols[k - 1] = idx;
    }
    // Duplicate names would alias a slot and leave another name unresolved;
    // a simple count check catches both duplicates and unexpected columns.
    {
        std::vector<std::string> sorted = cols;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw MissingColumn("duplicate column name in header");
    }

    Dataset ds;
    ds.n = raw.rows.size();
    ds.p = p;
    if (ds.n == 0) throw DataError("dataset has no rows");
    ds.outcome.resize(ds.n);
    ds.treatment.resize(ds.n);
    ds.attribute.resize(ds.n);
    ds.covariates.assign(ds.n, std::vector<double>(p));

    for (std::size_t i = 0; i < ds.n; ++i) {
        const auto& row = raw.rows[i];
        if (row.size() != cols.size())
            throw DataError("row " + std::to_string(i + 1) + " has " +
                            std::to_string(row.size()) + " cells, expected " +
                            std::to_string(cols.size()));
        double y = row[yi], d = row[di], s = row[si];
        if (!std::isfinite(y))
            throw NonFiniteValue("non-finite outcome in row " + std::to_string(i + 1));
        if (!std::isfinite(d) || !is_binary(d))
            throw NonBinaryIndicator("treatment d must be 0 or 1 (row " +
                                     std::to_string(i + 1) + ")");
        if (!std::isfinite(s) || !is_binary(s))
            throw NonBinaryIndicator("attribute s must be 0 or 1 (row " +
                                     std::to_string(i + 1) + ")");
        ds.outcome[i] = y;
        ds.treatment[i] = static_cast<int>(d);
        ds.attribute[i] = static_cast<int>(s);
        for (std::size_t k = 0; k < p; ++k) {
            double x = row[xcols[k]];
            if (!std::isfinite(x))
                throw NonFiniteValue("non-finite covariate x" + std::to_string(k + 1) +
                                     " in row " + std::to_string(i + 1));
            ds.covariates[i][k] = x;
        }
    }

    // Overlap in-sample: every attribute-group x treatment-arm cell nonempty.
    for (int s = 0; s <= 1; ++s)
        for (int d = 0; d <= 1; ++d)
            if (ds.cell_count(s, d) == 0)
                throw EmptyCell("empty cell: no units with s=" + std::to_string(s) +
                                ", d=" + std::to_string(d));
    return ds;
}

FoldAssignment split_folds(const Dataset& ds, int K, std::uint64_t seed) {
    if (K < 2 || static_cast<std::size_t>(K) > ds.n)
        throw ConfigError("fold count K must satisfy 2 <= K <= n, got " +
                          std::to_string(K));
    for (int s = 0; s <= 1; ++s)
        for (int d = 0; d <= 1; ++d)
            if (ds.cell_count(s, d) < static_cast<std::size_t>(K))
                throw InfeasibleStratification(
                    "cell s=" + std::to_string(s) + ", d=" + std::to_string(d) +
                    " has fewer than K=" + std::to_string(K) + " units");

    FoldAssignment fa;
    fa.K = K;
    fa.fold_of.assign(ds.n, 0);
    Rng rng(seed);
    // Shuffle each (S,D) cell independently and deal round-robin from fold 1,
    // so cells of size >= K put at least one unit into every fold.
    for (int s = 0; s <= 1; ++s) {
        for (int d = 0; d <= 1; ++d) {
            std::vector<std::size_t> members;
            for (std::size_t i = 0; i < ds.n; ++i)
                if (ds.attribute[i] == s && ds.treatment[i] == d) members.push_back(i);
            rng.shuffle(members);
            for (std::size_t j = 0; j < members.size(); ++j)
                fa.fold_of[members[j]] = static_cast<int>(j % K) + 1;
        }
    }
    return fa;
}

namespace {

double parse_cell(const std::string& token, std::size_t row1, std::size_t col1) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    // Trim surrounding whitespace (std::from_chars does not skip it).
    while (first < last && (*first == ' ' || *first == '\t' || *first == '\r')) ++first;
    while (last > first && (*(last - 1) == ' ' || *(last - 1) == '\t' || *(last - 1) == '\r')) --last;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw NonFiniteValue("cell at row " + std::to_string(row1) + ", column " +
                             std::to_string(col1) + " is not a finite number: '" +
                             token + "'");
    return value;
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double v) {
    std::array<char, 32> buf;
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return std::string(buf.data(), ptr);
}

}  // namespace

RawTable read_csv_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open data file: " + path);
    RawTable raw;
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty data file: " + path);
    for (auto& name : split_line(line)) {
        // Header names are trimmed of surrounding whitespace.
        std::size_t a = name.find_first_not_of(" \t");
        std::size_t b = name.find_last_not_of(" \t");
        raw.columns.push_back(a == std::string::npos ? "" : name.substr(a, b - a + 1));
    }
    std::size_t row1 = 1;
    while (std::getline(in, line)) {
        ++row1;
        if (line.empty()) continue;
        auto tokens = split_line(line);
        if (tokens.size() != raw.columns.size())
            throw DataError("row " + std::to_string(row1) + " has " +
                            std::to_string(tokens.size()) + " cells, expected " +
                            std::to_string(raw.columns.size()));
        std::vector<double> row(tokens.size());
        for (std::size_t j = 0; j < tokens.size(); ++j)
            row[j] = parse_cell(tokens[j], row1, j + 1);
        raw.rows.push_back(std::move(row));
    }
    return raw;
}

void write_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write data file: " + path);
    out << "y,d,s";
    for (std::size_t k = 1; k <= ds.p; ++k) out << ",x" << k;
    out << "\n";
    for (std::size_t i = 0; i < ds.n; ++i) {
        out << format_double(ds.outcome[i]) << ',' << ds.treatment[i] << ','
            << ds.attribute[i];
        for (std::size_t k = 0; k < ds.p; ++k)
            out << ',' << format_double(ds.covariates[i][k]);
        out << "\n";
    }
    if (!out) throw DataError("write failure on data file: " + path);
}

Dataset read_dataset(const std::string& path) { return validate_dataset(read_csv_table(path)); }

}  // namespace fairpol
