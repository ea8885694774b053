#ifndef ARCCONF_SCORING_HPP
#define ARCCONF_SCORING_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arcconf/dataset.hpp"

namespace arcconf {

enum class ScoreFamily { BdeuExact, BicCpt, BicNoisyOr };

std::string score_family_name(ScoreFamily f);
ScoreFamily score_family_from_name(const std::string& name);

// Scoring hyperparameters. `kappa` is the per-arc structure-prior factor
// (log prior of a structure with M arcs is M * ln kappa, unnormalized);
// `ess` is the BDeu equivalent sample size.
struct ScoreConfig {
    ScoreFamily family = ScoreFamily::BdeuExact;
    double kappa = 1.0;
    double ess = 4.0;
    std::optional<int> max_parents;          // size cap consumed by search
    std::uint64_t max_parent_configs = 1ull << 20;  // capacity bound on q
    double noisyor_tol = 1e-8;               // fitter certificate for BicNoisyOr
    int noisyor_max_iter = 10000;

    void validate() const;
};

// One node together with its parent set and that family's contribution to
// the decomposable structure score (natural log scale, prior included).
struct FamilyScore {
    double log_score = 0.0;
    int node = 0;
    std::vector<int> parent_set;  // sorted ascending
};

// Joint counts of (parent configuration, child value) for one family.
// Parent configurations are mixed-radix indices over the parents in sorted
// index order, the last (largest-index) parent varying fastest.
struct FamilyCounts {
    std::uint64_t q_count = 1;  // number of parent configurations
    int r = 0;                  // child arity
    std::vector<std::int64_t> joint;   // q_count * r, [config * r + value]
    std::vector<std::int64_t> config;  // q_count, row totals per configuration
};

// Counts for (node | parents) with a capacity bound on the configuration
// space; throws CapacityError when the product of parent arities exceeds it.
FamilyCounts count_family(const Dataset& data, int node, std::span<const int> parents,
                          std::uint64_t max_parent_configs = 1ull << 20);

// Exact log marginal likelihood of one family under the BDeu prior with
// equivalent sample size `ess`. Deterministic and invariant to row order.
double bdeu_family_loglik(const Dataset& data, int node, std::span<const int> parents,
                          double ess, std::uint64_t max_parent_configs = 1ull << 20);

// BIC score of one CPT family: maximum log likelihood at the empirical
// conditional frequencies minus (d/2) ln n with d = q * (r - 1).
double bic_cpt_family(const Dataset& data, int node, std::span<const int> parents,
                      std::uint64_t max_parent_configs = 1ull << 20);

// M * ln(kappa): the unnormalized log structure prior for M arcs.
double structure_log_prior(int arc_count, double kappa);

// Family score under `config`: data term of the configured family plus
// |parents| * ln kappa. BicNoisyOr dispatches to the noisy-OR fitter.
FamilyScore family_score(const Dataset& data, int node, std::span<const int> parents,
                         const ScoreConfig& config);

namespace detail {

// Closed-form BDeu from counts alone. With no observations every term
// vanishes and the result is exactly 0.
double bdeu_from_counts(const FamilyCounts& counts, double ess);

double bic_from_counts(const FamilyCounts& counts, std::int64_t n_rows);

}  // namespace detail

}  // namespace arcconf

#endif  // ARCCONF_SCORING_HPP
