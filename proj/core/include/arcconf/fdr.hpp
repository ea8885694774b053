#ifndef ARCCONF_FDR_HPP
#define ARCCONF_FDR_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arcconf/dag.hpp"
#include "arcconf/dataset.hpp"
#include "arcconf/random.hpp"
#include "arcconf/search.hpp"

namespace arcconf {

// Permutation-based FDR estimate for one search configuration. The numeric
// fields stay empty when the search finds no arcs: with zero discoveries
// the ratio is undefined and is reported as such, never as a number.
struct FdrEstimate {
    int observed_arcs = 0;            // N(D, a)
    std::vector<int> null_counts;     // N(D^q, a), q = 1..Q
    int q_permutations = 0;           // Q
    std::optional<double> fdr_raw;    // ((1 + sum null) / Q) / observed
    std::optional<double> fdr_clamped;  // min(raw, 1)
    std::optional<double> expected_ppv;  // 1 - clamped
    std::uint64_t seed = 0;

    bool no_discoveries() const { return observed_arcs == 0; }
};

// The estimator arithmetic on its own: the +1 in the numerator smooths the
// null-count average so it can never report exactly zero.
FdrEstimate make_fdr_estimate(int observed_arcs, std::vector<int> null_counts,
                              int q_permutations, std::uint64_t seed);

// Copy of the dataset with column `node` replaced by a uniform random
// permutation of its own values; every other column untouched. The
// permuted column's multiset of values is preserved exactly.
Dataset permute_column_for_node(const Dataset& data, int node, RngStream& rng);

// One null replicate: for each allowed child independently, permute that
// child's column (fresh draw from the stream keyed by seed, kappa,
// replicate, node) and count the arcs the per-node search finds on it.
// Other columns stay real, so candidate-parent joint structure is kept
// while every arc hypothesis into the child is false by construction.
int null_arc_count(const Dataset& data, const SearchConfig& config, std::uint64_t seed,
                   int replicate, int workers = 1);

struct FdrResult {
    FdrEstimate estimate;
    Dag model;  // structure learned from the real data
};

// Runs the search on the real data, then Q null replicates, and assembles
// the smoothed estimate. Deterministic given (data, config, Q, seed) for
// any worker count.
FdrResult estimate_fdr(const Dataset& data, const SearchConfig& config, int q_permutations,
                       std::uint64_t seed, int workers = 1);

struct FdrSweepPoint {
    double kappa = 0.0;
    std::optional<FdrResult> result;    // absent when the point errored
    std::optional<std::string> error;
};

// One estimate per kappa; null replicates are re-drawn for each kappa
// (streams are keyed by the kappa value, so duplicate grid entries give
// identical results). Per-point errors are recorded and the sweep
// continues.
std::vector<FdrSweepPoint> fdr_sweep(const Dataset& data, const SearchConfig& base,
                                     std::span<const double> kappa_grid, int q_permutations,
                                     std::uint64_t seed, int workers = 1);

}  // namespace arcconf

#endif  // ARCCONF_FDR_HPP
