#ifndef ARCCONF_SEARCH_HPP
#define ARCCONF_SEARCH_HPP

#include <optional>
#include <vector>

#include "arcconf/dag.hpp"
#include "arcconf/dataset.hpp"
#include "arcconf/scoring.hpp"

namespace arcconf {

// Configuration of the decomposable greedy search. The restrictions exist
// for bipartite models: only the listed children are searched, and each
// child's candidates can be limited to a fixed parent pool.
struct SearchConfig {
    ScoreConfig score;
    std::optional<std::vector<int>> allowed_children;  // default: every node
    std::optional<std::vector<int>> allowed_parents;   // default: all predecessors

    // Effective parent-set cap: an explicit max_parents wins; otherwise 6
    // for CPT families and unlimited for noisy-OR.
    int effective_max_parents(int candidate_count) const;

    void validate(const Dataset& data) const;
    bool child_allowed(int node) const;
};

struct NodeSearchResult {
    std::vector<int> parents;         // sorted ascending
    FamilyScore score;                // final family score (prior included)
    std::vector<double> score_trace;  // family score after each accepted move
};

// Greedy parent-set search for one node: starts from the empty set, applies
// the strictly best single-parent addition or deletion until no move
// improves the score. Ties prefer deletion over addition, then the lowest
// parent index.
NodeSearchResult learn_parent_set(const Dataset& data, int node, const SearchConfig& config);

struct StructureResult {
    Dag dag;
    std::vector<FamilyScore> scores;  // one per node, indexed by node
    double total_score = 0.0;
};

// Runs learn_parent_set independently for every allowed child and assembles
// the structure. The result is identical for any worker count.
StructureResult learn_structure(const Dataset& data, const SearchConfig& config,
                                int workers = 1);

}  // namespace arcconf

#endif  // ARCCONF_SEARCH_HPP
