#include "arcconf/search.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "arcconf/parallel.hpp"

namespace arcconf {

int SearchConfig::effective_max_parents(int candidate_count) const {
    if (score.max_parents) return std::min(*score.max_parents, candidate_count);
    if (score.family == ScoreFamily::BicNoisyOr) return candidate_count;
    return std::min(6, candidate_count);
}

bool SearchConfig::child_allowed(int node) const {
    if (!allowed_children) return true;
    return std::find(allowed_children->begin(), allowed_children->end(), node) !=
           allowed_children->end();
}

void SearchConfig::validate(const Dataset& data) const {
    score.validate();
    std::vector<std::string> problems;
    if (allowed_children)
        for (int c : *allowed_children)
            if (c < 0 || c >= data.vars())
                problems.push_back("allowed child " + std::to_string(c) + " out of range");
    if (allowed_parents)
        for (int p : *allowed_parents)
            if (p < 0 || p >= data.vars())
                problems.push_back("allowed parent " + std::to_string(p) + " out of range");
    if (!problems.empty()) throw ValidationError("invalid search config", problems);
}

namespace {

// Scores within one node's search are memoized by parent set; the cache is
// local to the search, so concurrent node searches share nothing.
class FamilyScorer {
public:
    FamilyScorer(const Dataset& data, int node, const ScoreConfig& config)
        : data_(data), node_(node), config_(config) {}

    double operator()(const std::vector<int>& parents) {
        auto it = cache_.find(parents);
        if (it != cache_.end()) return it->second;
        double value = family_score(data_, node_, parents, config_).log_score;
        cache_.emplace(parents, value);
        return value;
    }

private:
    const Dataset& data_;
    int node_;
    const ScoreConfig& config_;
    std::map<std::vector<int>, double> cache_;
};

}  // namespace

NodeSearchResult learn_parent_set(const Dataset& data, int node, const SearchConfig& config) {
    config.validate(data);
    if (node < 0 || node >= data.vars())
        throw ValidationError("learn_parent_set: node " + std::to_string(node) + " out of range");
    if (!config.child_allowed(node))
        throw ValidationError("learn_parent_set: node " + std::to_string(node) +
                              " is not an allowed child");

    std::vector<int> candidates = candidate_parents(node, data.ordering());
    if (config.allowed_parents) {
        std::vector<int> filtered;
        for (int c : candidates)
            if (std::find(config.allowed_parents->begin(), config.allowed_parents->end(), c) !=
                config.allowed_parents->end())
                filtered.push_back(c);
        candidates = std::move(filtered);
    }
    std::sort(candidates.begin(), candidates.end());
    const int max_parents = config.effective_max_parents(static_cast<int>(candidates.size()));

    FamilyScorer scorer(data, node, config.score);
    std::vector<int> current;  // sorted
    double current_score = scorer(current);

    NodeSearchResult result;
    result.score_trace.push_back(current_score);

    while (true) {
        double best_score = current_score;
        std::vector<int> best_set;
        bool improved = false;

        // Deletions first, in ascending parent order, so that the stated
        // tie-break (prefer deletion, then lowest index) falls out of the
        // strict comparison below.
        for (std::size_t i = 0; i < current.size(); ++i) {
            std::vector<int> cand(current);
            cand.erase(cand.begin() + static_cast<std::ptrdiff_t>(i));
            double s = scorer(cand);
            if (s > best_score) {
                best_score = s;
                best_set = std::move(cand);
                improved = true;
            }
        }
        if (static_cast<int>(current.size()) < max_parents) {
            for (int c : candidates) {
                if (std::binary_search(current.begin(), current.end(), c)) continue;
                std::vector<int> cand(current);
                cand.insert(std::upper_bound(cand.begin(), cand.end(), c), c);
                double s = scorer(cand);
                if (s > best_score) {
                    best_score = s;
                    best_set = std::move(cand);
                    improved = true;
                }
            }
        }
        if (!improved) break;
        current = std::move(best_set);
        current_score = best_score;
        result.score_trace.push_back(current_score);
    }

    result.parents = current;
    result.score.node = node;
    result.score.parent_set = std::move(current);
    result.score.log_score = current_score;
    result.parents = result.score.parent_set;
    return result;
}

StructureResult learn_structure(const Dataset& data, const SearchConfig& config, int workers) {
    config.validate(data);
    const int n = data.vars();

    std::vector<int> children;
    if (config.allowed_children) {
        children = *config.allowed_children;
        std::sort(children.begin(), children.end());
        children.erase(std::unique(children.begin(), children.end()), children.end());
    } else {
        children.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) children[static_cast<std::size_t>(i)] = i;
    }

    std::vector<NodeSearchResult> per_node(children.size());
    parallel_for(static_cast<int>(children.size()), workers, [&](int idx) {
        per_node[static_cast<std::size_t>(idx)] =
            learn_parent_set(data, children[static_cast<std::size_t>(idx)], config);
    });

    std::vector<std::vector<int>> parents(static_cast<std::size_t>(n));
    std::vector<FamilyScore> scores(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        scores[static_cast<std::size_t>(i)].node = i;
        scores[static_cast<std::size_t>(i)].log_score = 0.0;
    }
    double total = 0.0;
    for (std::size_t idx = 0; idx < children.size(); ++idx) {
        const int node = children[idx];
        parents[static_cast<std::size_t>(node)] = per_node[idx].parents;
        scores[static_cast<std::size_t>(node)] = per_node[idx].score;
        total += per_node[idx].score.log_score;
    }

    StructureResult out{Dag(std::move(parents), data.ordering()), std::move(scores), total};
    return out;
}

}  // namespace arcconf
