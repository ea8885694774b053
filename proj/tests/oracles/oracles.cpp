#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "arcconf/noisy_or.hpp"

namespace arcconf::oracle {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double tanh_sinh_01_log(const std::function<double(double, double)>& log_f) {
    // x(t) = sigmoid(pi * sinh t); weight = (pi/4) cosh t / cosh^2((pi/2) sinh t).
    // |t| capped where exp(+-pi sinh t) saturates; the integrand there is
    // far below double resolution for any integrable singularity.
    const double pi = 3.14159265358979323846;
    double best = 0.0;
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int level = 3; level <= 10; ++level) {
        const double h = 1.0 / static_cast<double>(1 << level);
        const int kmax = static_cast<int>(6.0 / h);
        double sum = 0.0;
        for (int k = -kmax; k <= kmax; ++k) {
            const double t = k * h;
            const double sh = std::sinh(t);
            const double z = pi * sh;
            if (z > 700.0 || z < -700.0) continue;
            const double log_x = -std::log1p(std::exp(-z));       // ln sigmoid(z)
            const double log_1mx = -std::log1p(std::exp(z));      // ln sigmoid(-z)
            const double ch = std::cosh(pi / 2.0 * sh);
            const double w = (pi / 4.0) * std::cosh(t) / (ch * ch);
            const double lf = log_f(log_x, log_1mx);
            if (lf == kNegInf) continue;
            sum += std::exp(lf) * w;
        }
        best = sum * h;
        if (!std::isnan(prev) && std::abs(best - prev) <= 1e-14 * std::abs(best)) break;
        prev = best;
    }
    return best;
}

namespace {

// Counts per observed parent configuration, keyed by the parent value
// vector itself (no mixed-radix arithmetic shared with the library).
std::map<std::vector<int>, std::vector<std::int64_t>> map_counts(const Dataset& data, int node,
                                                                 std::span<const int> parents) {
    std::map<std::vector<int>, std::vector<std::int64_t>> counts;
    std::vector<int> key(parents.size());
    for (int row = 0; row < data.rows(); ++row) {
        for (std::size_t t = 0; t < parents.size(); ++t) key[t] = data.value(row, parents[t]);
        auto& cell = counts[key];
        if (cell.empty()) cell.assign(static_cast<std::size_t>(data.arity(node)), 0);
        ++cell[static_cast<std::size_t>(data.value(row, node))];
    }
    return counts;
}

std::uint64_t parent_config_space(const Dataset& data, std::span<const int> parents) {
    std::uint64_t q = 1;
    for (int p : parents) q *= static_cast<std::uint64_t>(data.arity(p));
    return q;
}

}  // namespace

double dirichlet_integral_bdeu(const Dataset& data, int node, std::span<const int> parents,
                               double ess) {
    if (data.arity(node) != 2)
        throw ValidationError("dirichlet_integral_bdeu supports binary children only");
    const std::uint64_t q = parent_config_space(data, parents);
    const double a = ess / (2.0 * static_cast<double>(q));  // per-cell prior count

    double total = 0.0;
    for (const auto& [key, cell] : map_counts(data, node, parents)) {
        const double n0 = static_cast<double>(cell[0]);
        const double n1 = static_cast<double>(cell[1]);
        const double numer = tanh_sinh_01_log([&](double lx, double l1mx) {
            return (n1 + a - 1.0) * lx + (n0 + a - 1.0) * l1mx;
        });
        const double denom = tanh_sinh_01_log([&](double lx, double l1mx) {
            return (a - 1.0) * lx + (a - 1.0) * l1mx;
        });
        total += std::log(numer) - std::log(denom);
    }
    return total;  // unobserved configurations contribute ln(1) = 0
}

double bdeu_direct(const Dataset& data, int node, std::span<const int> parents, double ess) {
    const std::uint64_t q = parent_config_space(data, parents);
    const int r = data.arity(node);
    const double alpha_config = ess / static_cast<double>(q);
    const double alpha_cell = alpha_config / static_cast<double>(r);

    double total = 0.0;
    for (const auto& [key, cell] : map_counts(data, node, parents)) {
        std::int64_t nj = 0;
        for (std::int64_t c : cell) nj += c;
        total += std::lgamma(alpha_config) - std::lgamma(alpha_config + static_cast<double>(nj));
        for (std::int64_t c : cell)
            total += std::lgamma(alpha_cell + static_cast<double>(c)) - std::lgamma(alpha_cell);
    }
    return total;
}

double expected_true_arcs_bruteforce(const Dataset& data, const Dag& g_l, double kappa,
                                     double ess) {
    const auto& ordering = data.ordering();
    const int n = data.vars();

    // Per node: candidate predecessors and the scores of every subset.
    std::vector<std::vector<int>> candidates(static_cast<std::size_t>(n));
    std::vector<std::vector<std::vector<int>>> subsets(static_cast<std::size_t>(n));
    std::vector<std::vector<double>> scores(static_cast<std::size_t>(n));
    for (int node = 0; node < n; ++node) {
        candidates[static_cast<std::size_t>(node)] = candidate_parents(node, ordering);
        auto& cand = candidates[static_cast<std::size_t>(node)];
        std::sort(cand.begin(), cand.end());
        const int m = static_cast<int>(cand.size());
        for (int mask = 0; mask < (1 << m); ++mask) {
            std::vector<int> set;
            for (int b = 0; b < m; ++b)
                if (mask & (1 << b)) set.push_back(cand[static_cast<std::size_t>(b)]);
            const double s = bdeu_direct(data, node, set, ess) +
                             static_cast<double>(set.size()) * std::log(kappa);
            subsets[static_cast<std::size_t>(node)].push_back(std::move(set));
            scores[static_cast<std::size_t>(node)].push_back(s);
        }
    }

    // Odometer over the per-node subset choices = all ordering-consistent
    // structures. Accumulate log-sum-exp of scores and of score-weighted
    // overlap counts.
    std::vector<std::size_t> pick(static_cast<std::size_t>(n), 0);
    double max_score = kNegInf;
    std::vector<std::pair<double, int>> all;  // (log score, overlap)
    while (true) {
        double log_score = 0.0;
        int overlap = 0;
        for (int node = 0; node < n; ++node) {
            log_score += scores[static_cast<std::size_t>(node)][pick[static_cast<std::size_t>(node)]];
            for (int p : subsets[static_cast<std::size_t>(node)][pick[static_cast<std::size_t>(node)]])
                if (g_l.has_arc(p, node)) ++overlap;
        }
        all.emplace_back(log_score, overlap);
        max_score = std::max(max_score, log_score);

        int pos = 0;
        while (pos < n) {
            if (++pick[static_cast<std::size_t>(pos)] < subsets[static_cast<std::size_t>(pos)].size()) break;
            pick[static_cast<std::size_t>(pos)] = 0;
            ++pos;
        }
        if (pos == n) break;
    }

    double z = 0.0, weighted = 0.0;
    for (const auto& [ls, overlap] : all) {
        const double w = std::exp(ls - max_score);
        z += w;
        weighted += w * static_cast<double>(overlap);
    }
    return weighted / z;
}

ExhaustiveBest exhaustive_parent_search(const Dataset& data, int node,
                                        std::span<const int> candidates,
                                        const ScoreConfig& config) {
    std::vector<int> cand(candidates.begin(), candidates.end());
    std::sort(cand.begin(), cand.end());
    const int m = static_cast<int>(cand.size());

    ExhaustiveBest best;
    best.score = kNegInf;
    for (int mask = 0; mask < (1 << m); ++mask) {
        std::vector<int> set;
        for (int b = 0; b < m; ++b)
            if (mask & (1 << b)) set.push_back(cand[static_cast<std::size_t>(b)]);
        if (config.max_parents && static_cast<int>(set.size()) > *config.max_parents) continue;
        const double s = family_score(data, node, set, config).log_score;
        if (s > best.score) {
            best.score = s;
            best.parents = std::move(set);
        }
    }
    return best;
}

GridBest noisyor_grid_search(const Dataset& data, int node, std::span<const int> parents,
                             double resolution) {
    const int p = static_cast<int>(parents.size());
    const int steps = static_cast<int>(std::lround(1.0 / resolution)) + 1;

    // Collapse rows into activation patterns.
    std::map<std::vector<int>, std::pair<std::int64_t, std::int64_t>> buckets;
    std::vector<int> key(static_cast<std::size_t>(p));
    for (int row = 0; row < data.rows(); ++row) {
        for (int t = 0; t < p; ++t) key[static_cast<std::size_t>(t)] = data.value(row, parents[static_cast<std::size_t>(t)]);
        auto& b = buckets[key];
        if (data.value(row, node)) ++b.second;
        else ++b.first;
    }
    struct Pattern {
        std::vector<int> active;
        double n0, n1;
    };
    std::vector<Pattern> patterns;
    for (const auto& [k, counts] : buckets) {
        Pattern pat;
        for (int t = 0; t < p; ++t)
            if (k[static_cast<std::size_t>(t)]) pat.active.push_back(t);
        pat.n0 = static_cast<double>(counts.first);
        pat.n1 = static_cast<double>(counts.second);
        patterns.push_back(std::move(pat));
    }

    std::vector<double> grid(static_cast<std::size_t>(steps));
    std::vector<double> log1m(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        grid[static_cast<std::size_t>(i)] = std::min(1.0, i * resolution);
        log1m[static_cast<std::size_t>(i)] =
            grid[static_cast<std::size_t>(i)] >= 1.0 ? kNegInf : std::log1p(-grid[static_cast<std::size_t>(i)]);
    }

    GridBest best;
    best.loglik = kNegInf;
    std::vector<int> link_idx(static_cast<std::size_t>(p), 0);
    std::vector<double> pattern_prod(patterns.size());
    std::vector<double> per_leak(static_cast<std::size_t>(steps));

    while (true) {
        // Product over active links per pattern for this link assignment.
        for (std::size_t g = 0; g < patterns.size(); ++g) {
            double prod = 1.0;
            for (int t : patterns[g].active) prod *= 1.0 - grid[static_cast<std::size_t>(link_idx[static_cast<std::size_t>(t)])];
            pattern_prod[g] = prod;
        }
        std::fill(per_leak.begin(), per_leak.end(), 0.0);
        for (std::size_t g = 0; g < patterns.size(); ++g) {
            const Pattern& pat = patterns[g];
            const double lprod = pattern_prod[g] > 0.0 ? std::log(pattern_prod[g]) : kNegInf;
            for (int i = 0; i < steps; ++i) {
                double& acc = per_leak[static_cast<std::size_t>(i)];
                if (acc == kNegInf) continue;
                const double survive = (1.0 - grid[static_cast<std::size_t>(i)]) * pattern_prod[g];
                if (pat.n0 > 0.0) {
                    if (survive <= 0.0) {
                        acc = kNegInf;
                        continue;
                    }
                    acc += pat.n0 * (log1m[static_cast<std::size_t>(i)] + lprod);
                }
                if (pat.n1 > 0.0) {
                    const double react = 1.0 - survive;
                    if (react <= 0.0) {
                        acc = kNegInf;
                        continue;
                    }
                    acc += pat.n1 * std::log(react);
                }
            }
        }
        for (int i = 0; i < steps; ++i) {
            if (per_leak[static_cast<std::size_t>(i)] > best.loglik) {
                best.loglik = per_leak[static_cast<std::size_t>(i)];
                best.q.assign(1, grid[static_cast<std::size_t>(i)]);
                for (int t = 0; t < p; ++t)
                    best.q.push_back(grid[static_cast<std::size_t>(link_idx[static_cast<std::size_t>(t)])]);
            }
        }

        int pos = 0;
        while (pos < p) {
            if (++link_idx[static_cast<std::size_t>(pos)] < steps) break;
            link_idx[static_cast<std::size_t>(pos)] = 0;
            ++pos;
        }
        if (pos == p) break;
    }
    return best;
}

std::vector<double> noisyor_fd_gradient(const Dataset& data, int node,
                                        std::span<const int> parents,
                                        std::span<const double> theta, double step) {
    auto groups = detail::group_noisyor_rows(data, node, parents);
    std::vector<double> grad(theta.size());
    std::vector<double> point(theta.begin(), theta.end());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        point[i] = theta[i] + step;
        const double up = detail::neg_loglik(groups, point);
        point[i] = theta[i] - step;
        const double down = detail::neg_loglik(groups, point);
        point[i] = theta[i];
        grad[i] = (up - down) / (2.0 * step);
    }
    return grad;
}

Dataset random_dataset(RngStream& rng, int rows, const std::vector<int>& arities) {
    std::vector<std::vector<int>> columns(arities.size());
    for (std::size_t c = 0; c < arities.size(); ++c) {
        columns[c].resize(static_cast<std::size_t>(rows));
        for (int r = 0; r < rows; ++r)
            columns[c][static_cast<std::size_t>(r)] =
                static_cast<int>(rng.next_below(static_cast<std::uint64_t>(arities[c])));
    }
    std::vector<int> ordering(arities.size());
    for (std::size_t i = 0; i < arities.size(); ++i) ordering[i] = static_cast<int>(i);
    return Dataset(std::move(columns), arities, {}, std::move(ordering));
}

Dag random_dag(RngStream& rng, const std::vector<int>& ordering) {
    const int n = static_cast<int>(ordering.size());
    std::vector<std::vector<int>> parents(static_cast<std::size_t>(n));
    for (int node = 0; node < n; ++node) {
        for (int cand : candidate_parents(node, ordering))
            if (rng.next_unit() < 0.4) parents[static_cast<std::size_t>(node)].push_back(cand);
    }
    return Dag(std::move(parents), ordering);
}

}  // namespace arcconf::oracle
