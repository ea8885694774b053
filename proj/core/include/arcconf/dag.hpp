#ifndef ARCCONF_DAG_HPP
#define ARCCONF_DAG_HPP

#include <compare>
#include <span>
#include <vector>

#include "arcconf/errors.hpp"

namespace arcconf {

struct Arc {
    int parent = 0;
    int child = 0;
    auto operator<=>(const Arc&) const = default;
};

// A directed structure stored as per-node parent lists, together with the
// variable ordering it was built under. Construction enforces that every
// parent precedes its child in the ordering and that parent lists are
// duplicate-free; parent lists are kept sorted ascending.
class Dag {
public:
    Dag(std::vector<std::vector<int>> parents, std::vector<int> ordering);

    // Empty structure (no arcs) over the given ordering.
    static Dag empty(std::vector<int> ordering);

    int nodes() const { return static_cast<int>(parents_.size()); }
    const std::vector<int>& parents(int node) const { return parents_[static_cast<std::size_t>(node)]; }
    const std::vector<std::vector<int>>& all_parents() const { return parents_; }
    const std::vector<int>& ordering() const { return ordering_; }

    int arc_count() const;
    bool has_arc(int parent, int child) const;

    // Cycle check that does not rely on the ordering invariant (Kahn's
    // algorithm); always true for successfully constructed Dags, but
    // callable on its own as an independent audit.
    bool is_acyclic() const;

    bool operator==(const Dag& other) const = default;

private:
    std::vector<std::vector<int>> parents_;
    std::vector<int> ordering_;
};

// The arcs of a structure as an explicit ordered-pair set.
class ArcSet {
public:
    ArcSet() = default;
    explicit ArcSet(std::vector<Arc> arcs);
    static ArcSet from_dag(const Dag& g);

    int size() const { return static_cast<int>(arcs_.size()); }
    bool contains(const Arc& a) const;
    const std::vector<Arc>& arcs() const { return arcs_; }

    auto begin() const { return arcs_.begin(); }
    auto end() const { return arcs_.end(); }

private:
    std::vector<Arc> arcs_;  // sorted, unique
};

// Number of arcs present in both structures. Throws ValidationError when
// the node counts differ.
int arc_overlap(const Dag& g, const Dag& g_ref);

}  // namespace arcconf

#endif  // ARCCONF_DAG_HPP
