#include "arcconf/fdr.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "arcconf/parallel.hpp"

namespace arcconf {

namespace {

std::uint64_t kappa_bits(double kappa) { return std::bit_cast<std::uint64_t>(kappa); }

std::vector<int> allowed_children_of(const Dataset& data, const SearchConfig& config) {
    std::vector<int> children;
    if (config.allowed_children) {
        children = *config.allowed_children;
        std::sort(children.begin(), children.end());
        children.erase(std::unique(children.begin(), children.end()), children.end());
    } else {
        children.resize(static_cast<std::size_t>(data.vars()));
        for (int i = 0; i < data.vars(); ++i) children[static_cast<std::size_t>(i)] = i;
    }
    return children;
}

int null_arcs_for_node(const Dataset& data, const SearchConfig& config, std::uint64_t seed,
                       int replicate, int node) {
    RngStream rng({seed, kappa_bits(config.score.kappa), static_cast<std::uint64_t>(replicate),
                   static_cast<std::uint64_t>(node)});
    Dataset permuted = permute_column_for_node(data, node, rng);
    return static_cast<int>(learn_parent_set(permuted, node, config).parents.size());
}

}  // namespace

FdrEstimate make_fdr_estimate(int observed_arcs, std::vector<int> null_counts,
                              int q_permutations, std::uint64_t seed) {
    if (q_permutations < 1) throw ValidationError("Q must be >= 1");
    if (observed_arcs < 0) throw ValidationError("observed arc count must be >= 0");

    FdrEstimate est;
    est.observed_arcs = observed_arcs;
    est.null_counts = std::move(null_counts);
    est.q_permutations = q_permutations;
    est.seed = seed;
    if (observed_arcs == 0) return est;  // no discoveries: FDR undefined

    std::int64_t total_null = 0;
    for (int c : est.null_counts) total_null += c;
    const double raw = ((1.0 + static_cast<double>(total_null)) /
                        static_cast<double>(q_permutations)) /
                       static_cast<double>(observed_arcs);
    est.fdr_raw = raw;
    est.fdr_clamped = std::min(raw, 1.0);
    est.expected_ppv = 1.0 - *est.fdr_clamped;
    return est;
}

Dataset permute_column_for_node(const Dataset& data, int node, RngStream& rng) {
    if (node < 0 || node >= data.vars())
        throw ValidationError("permute_column_for_node: node out of range");
    std::vector<int> column = data.column(node);
    rng.shuffle(column);
    return data.with_column(node, std::move(column));
}

int null_arc_count(const Dataset& data, const SearchConfig& config, std::uint64_t seed,
                   int replicate, int workers) {
    config.validate(data);
    const std::vector<int> children = allowed_children_of(data, config);
    std::vector<int> per_node(children.size(), 0);
    parallel_for(static_cast<int>(children.size()), workers, [&](int idx) {
        per_node[static_cast<std::size_t>(idx)] = null_arcs_for_node(
            data, config, seed, replicate, children[static_cast<std::size_t>(idx)]);
    });
    int total = 0;
    for (int c : per_node) total += c;
    return total;
}

FdrResult estimate_fdr(const Dataset& data, const SearchConfig& config, int q_permutations,
                       std::uint64_t seed, int workers) {
    if (q_permutations < 1) throw ValidationError("Q must be >= 1");
    config.validate(data);

    StructureResult learned = learn_structure(data, config, workers);
    const int observed = learned.dag.arc_count();
    if (observed == 0) {
        return FdrResult{make_fdr_estimate(0, {}, q_permutations, seed),
                         std::move(learned.dag)};
    }

    const std::vector<int> children = allowed_children_of(data, config);
    const int tasks = q_permutations * static_cast<int>(children.size());
    std::vector<int> per_task(static_cast<std::size_t>(tasks), 0);
    parallel_for(tasks, workers, [&](int t) {
        const int replicate = 1 + t / static_cast<int>(children.size());
        const int node = children[static_cast<std::size_t>(t % static_cast<int>(children.size()))];
        per_task[static_cast<std::size_t>(t)] =
            null_arcs_for_node(data, config, seed, replicate, node);
    });

    std::vector<int> null_counts(static_cast<std::size_t>(q_permutations), 0);
    for (int t = 0; t < tasks; ++t)
        null_counts[static_cast<std::size_t>(t / static_cast<int>(children.size()))] +=
            per_task[static_cast<std::size_t>(t)];

    return FdrResult{make_fdr_estimate(observed, std::move(null_counts), q_permutations, seed),
                     std::move(learned.dag)};
}

std::vector<FdrSweepPoint> fdr_sweep(const Dataset& data, const SearchConfig& base,
                                     std::span<const double> kappa_grid, int q_permutations,
                                     std::uint64_t seed, int workers) {
    if (kappa_grid.empty()) throw ValidationError("fdr_sweep: kappa grid is empty");
    std::vector<FdrSweepPoint> out;
    out.reserve(kappa_grid.size());
    for (double kappa : kappa_grid) {
        FdrSweepPoint point;
        point.kappa = kappa;
        try {
            SearchConfig config = base;
            config.score.kappa = kappa;
            point.result = estimate_fdr(data, config, q_permutations, seed, workers);
        } catch (const Error& e) {
            point.error = e.what();
        }
        out.push_back(std::move(point));
    }
    return out;
}

}  // namespace arcconf
