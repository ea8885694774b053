#include "arcconf/dataset.hpp"

#include <algorithm>

namespace arcconf {

std::vector<std::string> check_ordering(std::span<const int> ordering, int n) {
    std::vector<std::string> problems;
    if (static_cast<int>(ordering.size()) != n) {
        problems.push_back("ordering has " + std::to_string(ordering.size()) +
                           " entries, expected " + std::to_string(n));
        return problems;
    }
    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    for (std::size_t pos = 0; pos < ordering.size(); ++pos) {
        int v = ordering[pos];
        if (v < 0 || v >= n) {
            problems.push_back("ordering entry " + std::to_string(v) + " at position " +
                               std::to_string(pos) + " is out of range");
        } else if (seen[static_cast<std::size_t>(v)]++) {
            problems.push_back("ordering is not a permutation: index " + std::to_string(v) +
                               " repeats at position " + std::to_string(pos));
        }
    }
    return problems;
}

Dataset::Dataset(std::vector<std::vector<int>> columns, std::vector<int> arities,
                 std::vector<std::string> names, std::vector<int> ordering)
    : columns_(std::move(columns)),
      arities_(std::move(arities)),
      names_(std::move(names)),
      ordering_(std::move(ordering)) {
    std::vector<std::string> problems;
    const int n_vars = static_cast<int>(columns_.size());
    if (n_vars < 1) problems.push_back("dataset has no variables (N >= 1 required)");
    if (static_cast<int>(arities_.size()) != n_vars)
        problems.push_back("arities size " + std::to_string(arities_.size()) +
                           " does not match variable count " + std::to_string(n_vars));
    if (names_.empty()) {
        names_.reserve(static_cast<std::size_t>(n_vars));
        for (int i = 0; i < n_vars; ++i) names_.push_back("v" + std::to_string(i));
    } else if (static_cast<int>(names_.size()) != n_vars) {
        problems.push_back("names size " + std::to_string(names_.size()) +
                           " does not match variable count " + std::to_string(n_vars));
    }

    rows_ = n_vars > 0 ? static_cast<int>(columns_[0].size()) : 0;
    if (rows_ < 1) problems.push_back("dataset has no rows (n >= 1 required)");
    for (int i = 0; i < n_vars; ++i) {
        if (static_cast<int>(columns_[static_cast<std::size_t>(i)].size()) != rows_)
            problems.push_back("column " + std::to_string(i) + " has " +
                               std::to_string(columns_[static_cast<std::size_t>(i)].size()) +
                               " rows, expected " + std::to_string(rows_));
    }
    for (int i = 0; i < n_vars && i < static_cast<int>(arities_.size()); ++i) {
        if (arities_[static_cast<std::size_t>(i)] < 2)
            problems.push_back("variable " + std::to_string(i) + " has arity " +
                               std::to_string(arities_[static_cast<std::size_t>(i)]) +
                               " (>= 2 required)");
    }
    for (int i = 0; i < n_vars && i < static_cast<int>(arities_.size()); ++i) {
        const auto& col = columns_[static_cast<std::size_t>(i)];
        const int arity = arities_[static_cast<std::size_t>(i)];
        for (std::size_t k = 0; k < col.size(); ++k) {
            if (col[k] < 0 || col[k] >= arity) {
                problems.push_back("value " + std::to_string(col[k]) + " at row " +
                                   std::to_string(k) + ", column " + std::to_string(i) +
                                   " is outside [0, " + std::to_string(arity) + ")");
            }
        }
    }
    auto ordering_problems = check_ordering(ordering_, n_vars);
    problems.insert(problems.end(), ordering_problems.begin(), ordering_problems.end());

    if (!problems.empty()) throw ValidationError("invalid dataset", problems);
}

Dataset Dataset::with_column(int var, std::vector<int> values) const {
    if (var < 0 || var >= vars()) throw ValidationError("with_column: variable index out of range");
    auto columns = columns_;
    columns[static_cast<std::size_t>(var)] = std::move(values);
    return Dataset(std::move(columns), arities_, names_, ordering_);
}

std::vector<int> candidate_parents(int node, std::span<const int> ordering) {
    auto problems = check_ordering(ordering, static_cast<int>(ordering.size()));
    if (!problems.empty()) throw ValidationError("candidate_parents", problems);
    std::vector<int> out;
    for (int v : ordering) {
        if (v == node) return out;
        out.push_back(v);
    }
    throw ValidationError("candidate_parents: node " + std::to_string(node) +
                          " not present in ordering");
}

}  // namespace arcconf
