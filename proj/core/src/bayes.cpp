#include "arcconf/bayes.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <unordered_map>

#include "arcconf/parallel.hpp"

namespace arcconf {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ln Gamma(a + c) - ln Gamma(a) as a cumulative sum of ln(a + t), cached per
// distinct a and grown on demand. The enumeration hits the same a values
// (one per parent-arity product) millions of times.
class RisingLogGamma {
public:
    double operator()(double a, std::int64_t c) {
        auto& tab = tables_[std::bit_cast<std::uint64_t>(a)];
        if (tab.empty()) tab.push_back(0.0);
        while (static_cast<std::int64_t>(tab.size()) <= c) {
            const double t = static_cast<double>(tab.size() - 1);
            tab.push_back(tab.back() + std::log(a + t));
        }
        return tab[static_cast<std::size_t>(c)];
    }

private:
    std::unordered_map<std::uint64_t, std::vector<double>> tables_;
};

// Streaming log-sum-exp accumulator.
struct StreamLse {
    double max = kNegInf;
    double sum = 0.0;

    void add(double x) {
        if (x == kNegInf) return;
        if (x <= max) {
            sum += std::exp(x - max);
        } else {
            sum = (max == kNegInf) ? 1.0 : sum * std::exp(max - x) + 1.0;
            max = x;
        }
    }
    double value() const { return max == kNegInf ? kNegInf : max + std::log(sum); }
};

// Number of subsets of an m-element set with size <= k, saturated at
// cap + 1 to keep the capacity check overflow-free.
std::uint64_t bounded_subset_count(int m, int k, std::uint64_t cap) {
    unsigned __int128 total = 0;
    unsigned __int128 binom = 1;
    for (int j = 0; j <= k && j <= m; ++j) {
        if (j > 0) binom = binom * static_cast<unsigned>(m - j + 1) / static_cast<unsigned>(j);
        total += binom;
        if (total > cap) return cap + 1;
    }
    return static_cast<std::uint64_t>(total);
}

// Depth-first enumeration of bounded-size parent sets with partition
// refinement: rows are kept grouped by parent configuration, so extending a
// set by one variable costs one pass over the rows, and BDeu terms come
// straight from the group counts. Rows at index >= count_limit ride along
// in the partition without contributing counts (used for held-out rows).
class ParentSetEnumeration {
public:
    ParentSetEnumeration(const Dataset& data, int node, double ess,
                         std::uint64_t max_parent_configs, int count_limit)
        : data_(data),
          node_(node),
          ess_(ess),
          max_q_(max_parent_configs),
          count_limit_(count_limit),
          r_(data.arity(node)) {
        candidates_ = candidate_parents(node, data.ordering());
        std::sort(candidates_.begin(), candidates_.end());
    }

    const std::vector<int>& candidates() const { return candidates_; }

    struct Level {
        std::vector<int> rows;
        std::vector<int> ends;            // group end offsets into rows
        std::vector<std::int64_t> ccnt;   // per group: r child counts (counted rows only)
        std::uint64_t q_count = 1;
    };

    // Calls visit(subset, level) for every subset of candidates with
    // |subset| <= k, the empty set first, extensions in ascending candidate
    // order. `subset` holds candidate node indices, sorted ascending.
    void visit_all(int k, const std::function<void(const std::vector<int>&, const Level&)>& visit) {
        const int m = static_cast<int>(candidates_.size());
        k = std::min(k, m);
        levels_.assign(static_cast<std::size_t>(k) + 1, Level{});
        const int n = data_.rows();
        for (auto& lv : levels_) {
            lv.rows.reserve(static_cast<std::size_t>(n));
            lv.ends.reserve(static_cast<std::size_t>(n) + 1);
            lv.ccnt.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(r_));
        }

        Level& root = levels_[0];
        root.q_count = 1;
        root.rows.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) root.rows[static_cast<std::size_t>(i)] = i;
        root.ends.assign(1, n);
        root.ccnt.assign(static_cast<std::size_t>(r_), 0);
        const auto& child = data_.column(node_);
        for (int i = 0; i < std::min(n, count_limit_); ++i)
            ++root.ccnt[static_cast<std::size_t>(child[static_cast<std::size_t>(i)])];

        subset_.clear();
        dfs(0, 0, k, visit);
    }

    // BDeu data term of the subset represented by `level`.
    double score(const Level& level, RisingLogGamma& rising) const {
        const double alpha_config = ess_ / static_cast<double>(level.q_count);
        const double alpha_cell = alpha_config / static_cast<double>(r_);
        double total = 0.0;
        for (std::size_t g = 0; g < level.ends.size(); ++g) {
            const std::int64_t* cc = &level.ccnt[g * static_cast<std::size_t>(r_)];
            std::int64_t nj = 0;
            for (int v = 0; v < r_; ++v) nj += cc[v];
            if (nj == 0) continue;
            total -= rising(alpha_config, nj);
            for (int v = 0; v < r_; ++v)
                if (cc[v]) total += rising(alpha_cell, cc[v]);
        }
        return total;
    }

    int child_arity() const { return r_; }
    double ess() const { return ess_; }
    int count_limit() const { return count_limit_; }

private:
    void dfs(int depth, int first_candidate, int k,
             const std::function<void(const std::vector<int>&, const Level&)>& visit) {
        visit(subset_, levels_[static_cast<std::size_t>(depth)]);
        if (depth == k) return;
        const int m = static_cast<int>(candidates_.size());
        for (int ci = first_candidate; ci < m; ++ci) {
            split(levels_[static_cast<std::size_t>(depth)],
                  levels_[static_cast<std::size_t>(depth) + 1], candidates_[static_cast<std::size_t>(ci)]);
            subset_.push_back(candidates_[static_cast<std::size_t>(ci)]);
            dfs(depth + 1, ci + 1, k, visit);
            subset_.pop_back();
        }
    }

    void split(const Level& src, Level& dst, int var) {
        const int a = data_.arity(var);
        dst.q_count = src.q_count * static_cast<std::uint64_t>(a);
        if (dst.q_count > max_q_)
            throw CapacityError("parent configuration space too large for node " +
                                    std::to_string(node_),
                                dst.q_count, max_q_);
        const auto& col = data_.column(var);
        const auto& child = data_.column(node_);

        dst.rows.resize(src.rows.size());
        dst.ends.clear();
        dst.ccnt.clear();
        occupancy_.assign(static_cast<std::size_t>(a), 0);
        offsets_.assign(static_cast<std::size_t>(a), 0);

        int out_base = 0;
        int gbeg = 0;
        for (std::size_t g = 0; g < src.ends.size(); ++g) {
            const int gend = src.ends[g];
            std::fill(occupancy_.begin(), occupancy_.end(), 0);
            for (int i = gbeg; i < gend; ++i)
                ++occupancy_[static_cast<std::size_t>(col[static_cast<std::size_t>(src.rows[static_cast<std::size_t>(i)])])];
            int off = out_base;
            for (int v = 0; v < a; ++v) {
                offsets_[static_cast<std::size_t>(v)] = off;
                off += occupancy_[static_cast<std::size_t>(v)];
            }
            for (int i = gbeg; i < gend; ++i) {
                const int row = src.rows[static_cast<std::size_t>(i)];
                dst.rows[static_cast<std::size_t>(offsets_[static_cast<std::size_t>(col[static_cast<std::size_t>(row)])]++)] = row;
            }
            int cur = out_base;
            for (int v = 0; v < a; ++v) {
                const int cnt = occupancy_[static_cast<std::size_t>(v)];
                if (!cnt) continue;
                const std::size_t cbase = dst.ccnt.size();
                dst.ccnt.resize(cbase + static_cast<std::size_t>(r_), 0);
                for (int i = cur; i < cur + cnt; ++i) {
                    const int row = dst.rows[static_cast<std::size_t>(i)];
                    if (row < count_limit_)
                        ++dst.ccnt[cbase + static_cast<std::size_t>(child[static_cast<std::size_t>(row)])];
                }
                cur += cnt;
                dst.ends.push_back(cur);
            }
            out_base = cur;
            gbeg = gend;
        }
    }

    const Dataset& data_;
    int node_;
    double ess_;
    std::uint64_t max_q_;
    int count_limit_;
    int r_;
    std::vector<int> candidates_;
    std::vector<Level> levels_;
    std::vector<int> subset_;
    std::vector<int> occupancy_;
    std::vector<int> offsets_;
};

void require_bdeu(const ScoreConfig& config) {
    config.validate();
    if (config.family != ScoreFamily::BdeuExact)
        throw ValidationError(
            "the Bayesian estimator requires the exact BDeu family (marginal likelihoods for "
            "other families are not available in closed form)");
}

void check_enumeration_capacity(int m, int k, std::uint64_t max_subsets, int node) {
    const std::uint64_t count = bounded_subset_count(m, k, max_subsets);
    if (count > max_subsets)
        throw CapacityError("parent-set enumeration for node " + std::to_string(node) +
                                " is too large",
                            count, max_subsets);
}

}  // namespace

ParentSetPosterior enumerate_parent_posteriors(const Dataset& data, int node,
                                               const ScoreConfig& config, int size_limit,
                                               std::uint64_t max_subsets) {
    require_bdeu(config);
    if (size_limit < 0) throw ValidationError("size_limit must be >= 0");
    if (node < 0 || node >= data.vars())
        throw ValidationError("enumerate_parent_posteriors: node out of range");

    ParentSetPosterior post;
    post.node = node;
    post.size_limit = size_limit;

    ParentSetEnumeration enumeration(data, node, config.ess, config.max_parent_configs,
                                     data.rows());
    const int m = static_cast<int>(enumeration.candidates().size());
    check_enumeration_capacity(m, std::min(size_limit, m), max_subsets, node);

    RisingLogGamma rising;
    const double log_kappa = std::log(config.kappa);
    enumeration.visit_all(size_limit, [&](const std::vector<int>& subset, const auto& level) {
        ParentSetPosterior::Entry e;
        e.parent_set = subset;
        e.log_score = enumeration.score(level, rising) +
                      static_cast<double>(subset.size()) * log_kappa;
        post.entries.push_back(std::move(e));
    });

    StreamLse lse;
    for (const auto& e : post.entries) lse.add(e.log_score);
    const double log_z = lse.value();
    for (auto& e : post.entries) e.posterior = std::exp(e.log_score - log_z);

    std::sort(post.entries.begin(), post.entries.end(), [](const auto& a, const auto& b) {
        if (a.parent_set.size() != b.parent_set.size())
            return a.parent_set.size() < b.parent_set.size();
        return a.parent_set < b.parent_set;
    });
    return post;
}

std::vector<std::pair<int, double>> arc_marginals(const ParentSetPosterior& post) {
    std::unordered_map<int, double> acc;
    for (const auto& e : post.entries)
        for (int p : e.parent_set) acc[p] += e.posterior;
    std::vector<std::pair<int, double>> out(acc.begin(), acc.end());
    std::sort(out.begin(), out.end());
    for (auto& [p, v] : out) v = std::clamp(v, 0.0, 1.0);
    return out;
}

double ArcMarginalTable::marginal_for(int parent, int child) const {
    if (child < 0 || child >= static_cast<int>(candidates.size()))
        throw ValidationError("marginal_for: child " + std::to_string(child) + " out of range");
    const auto& cand = candidates[static_cast<std::size_t>(child)];
    auto it = std::lower_bound(cand.begin(), cand.end(), parent);
    if (it == cand.end() || *it != parent)
        throw ValidationError("arc " + std::to_string(parent) + " -> " + std::to_string(child) +
                              " is outside the candidate universe (ordering mismatch?)");
    return marginals[static_cast<std::size_t>(child)][static_cast<std::size_t>(it - cand.begin())];
}

ArcMarginalTable compute_arc_marginals(const Dataset& data, const ScoreConfig& config,
                                       int size_limit, std::uint64_t max_subsets, int workers) {
    require_bdeu(config);
    if (size_limit < 0) throw ValidationError("size_limit must be >= 0");

    const int n = data.vars();
    ArcMarginalTable table;
    table.ordering = data.ordering();
    table.candidates.resize(static_cast<std::size_t>(n));
    table.marginals.resize(static_cast<std::size_t>(n));

    const double log_kappa = std::log(config.kappa);
    parallel_for(n, workers, [&](int node) {
        ParentSetEnumeration enumeration(data, node, config.ess, config.max_parent_configs,
                                         data.rows());
        const auto& cand = enumeration.candidates();
        const int m = static_cast<int>(cand.size());
        check_enumeration_capacity(m, std::min(size_limit, m), max_subsets, node);

        std::vector<StreamLse> per_parent(cand.size());
        StreamLse total;
        RisingLogGamma rising;
        // Positions of each candidate for O(1) lookup during visits.
        std::unordered_map<int, int> pos;
        for (int i = 0; i < m; ++i) pos.emplace(cand[static_cast<std::size_t>(i)], i);

        enumeration.visit_all(size_limit, [&](const std::vector<int>& subset, const auto& level) {
            const double ls = enumeration.score(level, rising) +
                              static_cast<double>(subset.size()) * log_kappa;
            total.add(ls);
            for (int p : subset) per_parent[static_cast<std::size_t>(pos[p])].add(ls);
        });

        const double log_z = total.value();
        table.candidates[static_cast<std::size_t>(node)] = cand;
        auto& out = table.marginals[static_cast<std::size_t>(node)];
        out.resize(cand.size());
        for (std::size_t i = 0; i < cand.size(); ++i) {
            const double lv = per_parent[i].value();
            out[i] = lv == kNegInf ? 0.0 : std::clamp(std::exp(lv - log_z), 0.0, 1.0);
        }
    });
    return table;
}

double max_marginal_change(const ArcMarginalTable& a, const ArcMarginalTable& b) {
    if (a.ordering != b.ordering || a.candidates != b.candidates)
        throw ValidationError("max_marginal_change: tables cover different universes");
    double worst = 0.0;
    for (std::size_t c = 0; c < a.marginals.size(); ++c)
        for (std::size_t i = 0; i < a.marginals[c].size(); ++i)
            worst = std::max(worst, std::abs(a.marginals[c][i] - b.marginals[c][i]));
    return worst;
}

BayesEstimate expected_true_arcs(const ArcMarginalTable& marginals, const Dag& g_l) {
    if (static_cast<int>(marginals.candidates.size()) != g_l.nodes())
        throw ValidationError("expected_true_arcs: node counts differ");
    if (marginals.ordering != g_l.ordering())
        throw ValidationError("expected_true_arcs: orderings differ");

    BayesEstimate est;
    est.model_arc_count = g_l.arc_count();
    for (int child = 0; child < g_l.nodes(); ++child) {
        for (int parent : g_l.parents(child)) {
            const double m = marginals.marginal_for(parent, child);
            est.per_arc_marginals.emplace_back(Arc{parent, child}, m);
            est.expected_true_arcs += m;
        }
    }
    if (est.model_arc_count > 0)
        est.expected_ppv = est.expected_true_arcs / static_cast<double>(est.model_arc_count);
    return est;
}

std::vector<std::pair<Dag, BayesEstimate>> nested_models_by_threshold(
    const ArcMarginalTable& marginals, std::span<const double> thresholds) {
    std::vector<std::string> problems;
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (!(thresholds[i] > 0.0 && thresholds[i] <= 1.0))
            problems.push_back("threshold " + std::to_string(thresholds[i]) +
                               " outside (0, 1]");
        if (i > 0 && !(thresholds[i] < thresholds[i - 1]))
            problems.push_back("thresholds must be strictly descending");
    }
    if (!problems.empty()) throw ValidationError("invalid thresholds", problems);

    std::vector<std::pair<Dag, BayesEstimate>> out;
    out.reserve(thresholds.size());
    const int n = static_cast<int>(marginals.candidates.size());
    for (double t : thresholds) {
        std::vector<std::vector<int>> parents(static_cast<std::size_t>(n));
        for (int child = 0; child < n; ++child) {
            const auto& cand = marginals.candidates[static_cast<std::size_t>(child)];
            const auto& marg = marginals.marginals[static_cast<std::size_t>(child)];
            for (std::size_t i = 0; i < cand.size(); ++i)
                if (marg[i] > t) parents[static_cast<std::size_t>(child)].push_back(cand[i]);
        }
        Dag model(std::move(parents), marginals.ordering);
        BayesEstimate est = expected_true_arcs(marginals, model);
        out.emplace_back(std::move(model), std::move(est));
    }
    return out;
}

namespace {

void require_compatible(const Dataset& train, const Dataset& heldout) {
    std::vector<std::string> problems;
    if (train.vars() != heldout.vars())
        problems.push_back("variable counts differ");
    else {
        if (train.arities() != heldout.arities()) problems.push_back("arities differ");
        if (train.ordering() != heldout.ordering()) problems.push_back("orderings differ");
    }
    if (!problems.empty())
        throw ValidationError("train and held-out datasets are incompatible", problems);
}

}  // namespace

double plugin_log_predictive(const Dataset& train, const Dataset& heldout, const Dag& model,
                             double ess) {
    require_compatible(train, heldout);
    if (model.nodes() != train.vars() || model.ordering() != train.ordering())
        throw ValidationError("plugin_log_predictive: model does not match the data");
    if (!(ess > 0.0)) throw ValidationError("plugin_log_predictive: ess must be > 0");

    double total = 0.0;
    for (int node = 0; node < train.vars(); ++node) {
        const auto& parents = model.parents(node);
        FamilyCounts counts = count_family(train, node, parents);
        const double alpha_config = ess / static_cast<double>(counts.q_count);
        const double alpha_cell = alpha_config / static_cast<double>(counts.r);

        std::vector<std::uint64_t> strides(parents.size());
        std::uint64_t stride = 1;
        for (std::size_t t = parents.size(); t-- > 0;) {
            strides[t] = stride;
            stride *= static_cast<std::uint64_t>(train.arity(parents[t]));
        }
        for (int row = 0; row < heldout.rows(); ++row) {
            std::uint64_t cfg = 0;
            for (std::size_t t = 0; t < parents.size(); ++t)
                cfg += static_cast<std::uint64_t>(heldout.value(row, parents[t])) * strides[t];
            const int v = heldout.value(row, node);
            const std::int64_t njk =
                counts.joint[cfg * static_cast<std::uint64_t>(counts.r) + static_cast<std::uint64_t>(v)];
            const std::int64_t nj = counts.config[cfg];
            total += std::log((alpha_cell + static_cast<double>(njk)) /
                              (alpha_config + static_cast<double>(nj)));
        }
    }
    return total;
}

double model_averaged_log_predictive(const Dataset& train, const Dataset& heldout,
                                     const ScoreConfig& config, int size_limit,
                                     std::uint64_t max_subsets, int workers) {
    require_bdeu(config);
    require_compatible(train, heldout);
    if (size_limit < 0) throw ValidationError("size_limit must be >= 0");

    // Stack held-out rows under the training rows; they are partitioned
    // alongside but excluded from all counts.
    const int n_train = train.rows();
    std::vector<std::vector<int>> stacked_cols(static_cast<std::size_t>(train.vars()));
    for (int v = 0; v < train.vars(); ++v) {
        stacked_cols[static_cast<std::size_t>(v)] = train.column(v);
        const auto& h = heldout.column(v);
        stacked_cols[static_cast<std::size_t>(v)].insert(stacked_cols[static_cast<std::size_t>(v)].end(),
                                                          h.begin(), h.end());
    }
    Dataset stacked(std::move(stacked_cols), train.arities(), train.names(), train.ordering());

    const double log_kappa = std::log(config.kappa);
    std::vector<double> per_node(static_cast<std::size_t>(train.vars()), 0.0);

    parallel_for(train.vars(), workers, [&](int node) {
        // Pass 1: log posterior weights over parent sets, from training rows.
        std::vector<double> log_scores;
        {
            ParentSetEnumeration enumeration(train, node, config.ess, config.max_parent_configs,
                                             train.rows());
            const int m = static_cast<int>(enumeration.candidates().size());
            check_enumeration_capacity(m, std::min(size_limit, m), max_subsets, node);
            RisingLogGamma rising;
            enumeration.visit_all(size_limit,
                                  [&](const std::vector<int>& subset, const auto& level) {
                                      log_scores.push_back(
                                          enumeration.score(level, rising) +
                                          static_cast<double>(subset.size()) * log_kappa);
                                  });
        }
        StreamLse lse;
        for (double s : log_scores) lse.add(s);
        const double log_z = lse.value();

        // Pass 2: same enumeration over stacked rows; per held-out row,
        // accumulate the posterior-weighted BDeu predictive mixture.
        std::vector<double> mix(static_cast<std::size_t>(heldout.rows()), 0.0);
        {
            ParentSetEnumeration enumeration(stacked, node, config.ess, config.max_parent_configs,
                                             n_train);
            const auto& child = stacked.column(node);
            std::size_t index = 0;
            const int r = enumeration.child_arity();
            enumeration.visit_all(
                size_limit, [&](const std::vector<int>&, const auto& level) {
                    const double weight = std::exp(log_scores[index++] - log_z);
                    const double alpha_config = config.ess / static_cast<double>(level.q_count);
                    const double alpha_cell = alpha_config / static_cast<double>(r);
                    int gbeg = 0;
                    for (std::size_t g = 0; g < level.ends.size(); ++g) {
                        const int gend = level.ends[g];
                        const std::int64_t* cc = &level.ccnt[g * static_cast<std::size_t>(r)];
                        std::int64_t nj = 0;
                        for (int v = 0; v < r; ++v) nj += cc[v];
                        const double denom = alpha_config + static_cast<double>(nj);
                        for (int i = gbeg; i < gend; ++i) {
                            const int row = level.rows[static_cast<std::size_t>(i)];
                            if (row < n_train) continue;
                            const int v = child[static_cast<std::size_t>(row)];
                            mix[static_cast<std::size_t>(row - n_train)] +=
                                weight * (alpha_cell + static_cast<double>(cc[v])) / denom;
                        }
                        gbeg = gend;
                    }
                });
        }
        double node_total = 0.0;
        for (double p : mix) node_total += std::log(p);
        per_node[static_cast<std::size_t>(node)] = node_total;
    });

    double total = 0.0;
    for (double v : per_node) total += v;
    return total;
}

}  // namespace arcconf
