#ifndef ARCCONF_BAYES_HPP
#define ARCCONF_BAYES_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "arcconf/dag.hpp"
#include "arcconf/dataset.hpp"
#include "arcconf/scoring.hpp"

namespace arcconf {

// Estimator defaults; deliberately independent of any search kappa.
inline constexpr double kDefaultBayesKappa = 0.1;
inline constexpr double kDefaultBayesEss = 4.0;
inline constexpr int kDefaultBayesSizeLimit = 5;
inline constexpr std::uint64_t kDefaultMaxSubsets = 5'000'000;

// Exact posterior over the parent sets of one node, truncated to sets of
// size <= size_limit. Entries cover every subset of the candidates up to
// that size exactly once, ordered by size then lexicographically; posterior
// probabilities are normalized within the truncation.
struct ParentSetPosterior {
    struct Entry {
        std::vector<int> parent_set;  // sorted ascending
        double log_score = 0.0;       // data term + |set| * ln kappa, unnormalized
        double posterior = 0.0;
    };
    int node = 0;
    int size_limit = 0;
    std::vector<Entry> entries;
};

// Enumerates all bounded-size parent sets of `node`, scoring each with the
// exact BDeu marginal likelihood plus the structure prior, and normalizes
// with log-sum-exp. Requires config.family == BdeuExact. Throws
// CapacityError when the subset count exceeds `max_subsets`.
ParentSetPosterior enumerate_parent_posteriors(const Dataset& data, int node,
                                               const ScoreConfig& config, int size_limit,
                                               std::uint64_t max_subsets = kDefaultMaxSubsets);

// Marginal posterior of each candidate arc into the posterior's node:
// marginal(p) = sum of posterior over entries containing p. Returned as
// (parent, probability) sorted by parent index.
std::vector<std::pair<int, double>> arc_marginals(const ParentSetPosterior& post);

// Marginal arc posteriors for every node of the dataset, computed by a
// streaming pass over the same enumeration (no entry materialization).
struct ArcMarginalTable {
    std::vector<int> ordering;
    std::vector<std::vector<int>> candidates;  // per child, sorted ascending
    std::vector<std::vector<double>> marginals;  // aligned with candidates

    // Marginal of (parent -> child); throws ValidationError when the arc is
    // outside the candidate universe.
    double marginal_for(int parent, int child) const;
};

ArcMarginalTable compute_arc_marginals(const Dataset& data, const ScoreConfig& config,
                                       int size_limit,
                                       std::uint64_t max_subsets = kDefaultMaxSubsets,
                                       int workers = 1);

// Largest absolute marginal difference between two tables over the same
// universe; the truncation-robustness readout for size_limit vs
// size_limit + 1.
double max_marginal_change(const ArcMarginalTable& a, const ArcMarginalTable& b);

// Expected number of true arcs in a given learned model, with per-arc
// marginals and the expected positive predictive value (absent for an
// empty model).
struct BayesEstimate {
    double expected_true_arcs = 0.0;
    std::vector<std::pair<Arc, double>> per_arc_marginals;
    int model_arc_count = 0;
    std::optional<double> expected_ppv;
};

// Because the posterior factorizes over nodes and the overlap count is a
// sum of arc indicators, the expectation reduces to the sum of the learned
// arcs' marginals.
BayesEstimate expected_true_arcs(const ArcMarginalTable& marginals, const Dag& g_l);

// Nested models: one per threshold (strictly descending, in (0,1]), each
// containing every arc with marginal strictly above the threshold.
std::vector<std::pair<Dag, BayesEstimate>> nested_models_by_threshold(
    const ArcMarginalTable& marginals, std::span<const double> thresholds);

// Held-out log predictive likelihood under a single structure with BDeu
// posterior-predictive parameters estimated from `train`.
double plugin_log_predictive(const Dataset& train, const Dataset& heldout, const Dag& model,
                             double ess);

// Held-out log predictive likelihood under model averaging: per node and
// per held-out row, a posterior-weighted mixture of BDeu posterior-
// predictive terms across all bounded-size parent sets.
double model_averaged_log_predictive(const Dataset& train, const Dataset& heldout,
                                     const ScoreConfig& config, int size_limit,
                                     std::uint64_t max_subsets = kDefaultMaxSubsets,
                                     int workers = 1);

}  // namespace arcconf

#endif  // ARCCONF_BAYES_HPP
