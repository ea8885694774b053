#include "arcconf/dag.hpp"

#include <algorithm>
#include <string>

#include "arcconf/dataset.hpp"

namespace arcconf {

Dag::Dag(std::vector<std::vector<int>> parents, std::vector<int> ordering)
    : parents_(std::move(parents)), ordering_(std::move(ordering)) {
    const int n = static_cast<int>(parents_.size());
    std::vector<std::string> problems = check_ordering(ordering_, n);

    // position of each node in the ordering
    std::vector<int> pos(static_cast<std::size_t>(n), -1);
    if (problems.empty()) {
        for (int p = 0; p < n; ++p) pos[static_cast<std::size_t>(ordering_[static_cast<std::size_t>(p)])] = p;
    }

    for (int child = 0; child < n; ++child) {
        auto& ps = parents_[static_cast<std::size_t>(child)];
        std::sort(ps.begin(), ps.end());
        for (std::size_t k = 0; k < ps.size(); ++k) {
            int parent = ps[k];
            if (parent < 0 || parent >= n) {
                problems.push_back("node " + std::to_string(child) + " has out-of-range parent " +
                                   std::to_string(parent));
                continue;
            }
            if (k > 0 && ps[k - 1] == parent)
                problems.push_back("node " + std::to_string(child) + " lists parent " +
                                   std::to_string(parent) + " twice");
            if (problems.empty() && pos[static_cast<std::size_t>(parent)] >= pos[static_cast<std::size_t>(child)])
                problems.push_back("parent " + std::to_string(parent) +
                                   " does not precede child " + std::to_string(child) +
                                   " in the ordering");
        }
    }
    if (!problems.empty()) throw ValidationError("invalid dag", problems);
}

Dag Dag::empty(std::vector<int> ordering) {
    std::vector<std::vector<int>> parents(ordering.size());
    return Dag(std::move(parents), std::move(ordering));
}

int Dag::arc_count() const {
    int m = 0;
    for (const auto& ps : parents_) m += static_cast<int>(ps.size());
    return m;
}

bool Dag::has_arc(int parent, int child) const {
    if (child < 0 || child >= nodes()) return false;
    const auto& ps = parents_[static_cast<std::size_t>(child)];
    return std::binary_search(ps.begin(), ps.end(), parent);
}

bool Dag::is_acyclic() const {
    const int n = nodes();
    std::vector<int> indegree(static_cast<std::size_t>(n), 0);
    std::vector<std::vector<int>> children(static_cast<std::size_t>(n));
    for (int child = 0; child < n; ++child) {
        indegree[static_cast<std::size_t>(child)] = static_cast<int>(parents_[static_cast<std::size_t>(child)].size());
        for (int p : parents_[static_cast<std::size_t>(child)]) {
            if (p < 0 || p >= n) return false;
            children[static_cast<std::size_t>(p)].push_back(child);
        }
    }
    std::vector<int> queue;
    for (int v = 0; v < n; ++v)
        if (indegree[static_cast<std::size_t>(v)] == 0) queue.push_back(v);
    int removed = 0;
    while (!queue.empty()) {
        int v = queue.back();
        queue.pop_back();
        ++removed;
        for (int c : children[static_cast<std::size_t>(v)]) {
            if (--indegree[static_cast<std::size_t>(c)] == 0) queue.push_back(c);
        }
    }
    return removed == n;
}

ArcSet::ArcSet(std::vector<Arc> arcs) : arcs_(std::move(arcs)) {
    std::sort(arcs_.begin(), arcs_.end());
    arcs_.erase(std::unique(arcs_.begin(), arcs_.end()), arcs_.end());
}

ArcSet ArcSet::from_dag(const Dag& g) {
    std::vector<Arc> arcs;
    arcs.reserve(static_cast<std::size_t>(g.arc_count()));
    for (int child = 0; child < g.nodes(); ++child)
        for (int p : g.parents(child)) arcs.push_back(Arc{p, child});
    return ArcSet(std::move(arcs));
}

bool ArcSet::contains(const Arc& a) const {
    return std::binary_search(arcs_.begin(), arcs_.end(), a);
}

int arc_overlap(const Dag& g, const Dag& g_ref) {
    if (g.nodes() != g_ref.nodes())
        throw ValidationError("arc_overlap: node counts differ (" + std::to_string(g.nodes()) +
                              " vs " + std::to_string(g_ref.nodes()) + ")");
    int count = 0;
    for (int child = 0; child < g.nodes(); ++child) {
        const auto& a = g.parents(child);
        const auto& b = g_ref.parents(child);
        std::size_t i = 0, j = 0;
        while (i < a.size() && j < b.size()) {
            if (a[i] < b[j]) ++i;
            else if (b[j] < a[i]) ++j;
            else { ++count; ++i; ++j; }
        }
    }
    return count;
}

}  // namespace arcconf
