#ifndef ARCCONF_DATASET_HPP
#define ARCCONF_DATASET_HPP

#include <span>
#include <string>
#include <vector>

#include "arcconf/errors.hpp"

namespace arcconf {

// Checks that `ordering` is a permutation of {0..n-1}; returns diagnostics.
std::vector<std::string> check_ordering(std::span<const int> ordering, int n);

// An immutable table of discrete observations. Columns are variables,
// rows are observations; values are dense category indices in [0, arity).
// Carries the variable ordering (position = precedence) that every
// learned structure must respect.
class Dataset {
public:
    // Validates all invariants; throws ValidationError listing every
    // violation (out-of-range value with row/column, bad arity, bad
    // ordering). `columns[i]` holds the values of variable i.
    Dataset(std::vector<std::vector<int>> columns, std::vector<int> arities,
            std::vector<std::string> names, std::vector<int> ordering);

    int rows() const { return rows_; }
    int vars() const { return static_cast<int>(columns_.size()); }

    int value(int row, int var) const { return columns_[static_cast<std::size_t>(var)][static_cast<std::size_t>(row)]; }
    const std::vector<int>& column(int var) const { return columns_[static_cast<std::size_t>(var)]; }
    int arity(int var) const { return arities_[static_cast<std::size_t>(var)]; }
    const std::vector<int>& arities() const { return arities_; }
    const std::string& name(int var) const { return names_[static_cast<std::size_t>(var)]; }
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<int>& ordering() const { return ordering_; }

    // Copy with one column replaced (same arity; values validated).
    Dataset with_column(int var, std::vector<int> values) const;

private:
    std::vector<std::vector<int>> columns_;
    std::vector<int> arities_;
    std::vector<std::string> names_;
    std::vector<int> ordering_;
    int rows_ = 0;
};

// The nodes preceding `node` in the ordering, in ordering order. These are
// exactly the parents a structure consistent with the ordering may use.
std::vector<int> candidate_parents(int node, std::span<const int> ordering);

}  // namespace arcconf

#endif  // ARCCONF_DATASET_HPP
