#include "arcconf/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "arcconf/noisy_or.hpp"

namespace arcconf {

namespace {

double log_gamma(double x) {
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

void require_sorted_candidates(const Dataset& data, int node, std::span<const int> parents) {
    std::vector<std::string> problems;
    if (node < 0 || node >= data.vars())
        problems.push_back("node index " + std::to_string(node) + " out of range");
    for (std::size_t i = 0; i < parents.size(); ++i) {
        int p = parents[i];
        if (p < 0 || p >= data.vars())
            problems.push_back("parent index " + std::to_string(p) + " out of range");
        else if (p == node)
            problems.push_back("node " + std::to_string(node) + " cannot be its own parent");
        if (i > 0 && parents[i - 1] >= p)
            problems.push_back("parent list must be sorted ascending without duplicates");
    }
    if (!problems.empty()) throw ValidationError("invalid family", problems);
}

}  // namespace

std::string score_family_name(ScoreFamily f) {
    switch (f) {
        case ScoreFamily::BdeuExact: return "bdeu";
        case ScoreFamily::BicCpt: return "bic-cpt";
        case ScoreFamily::BicNoisyOr: return "bic-noisyor";
    }
    return "unknown";
}

ScoreFamily score_family_from_name(const std::string& name) {
    if (name == "bdeu") return ScoreFamily::BdeuExact;
    if (name == "bic-cpt") return ScoreFamily::BicCpt;
    if (name == "bic-noisyor") return ScoreFamily::BicNoisyOr;
    throw ValidationError("unknown score family '" + name +
                          "' (expected bdeu, bic-cpt, or bic-noisyor)");
}

void ScoreConfig::validate() const {
    std::vector<std::string> problems;
    if (!(kappa > 0.0)) problems.push_back("kappa must be > 0");
    if (family == ScoreFamily::BdeuExact && !(ess > 0.0))
        problems.push_back("ess must be > 0 for the BDeu family");
    if (max_parents && *max_parents < 0) problems.push_back("max_parents must be >= 0");
    if (!(noisyor_tol > 0.0)) problems.push_back("noisyor_tol must be > 0");
    if (!problems.empty()) throw ValidationError("invalid score config", problems);
}

FamilyCounts count_family(const Dataset& data, int node, std::span<const int> parents,
                          std::uint64_t max_parent_configs) {
    require_sorted_candidates(data, node, parents);

    FamilyCounts counts;
    counts.r = data.arity(node);
    counts.q_count = 1;
    for (int p : parents) {
        counts.q_count *= static_cast<std::uint64_t>(data.arity(p));
        if (counts.q_count > max_parent_configs)
            throw CapacityError("parent configuration space too large for node " +
                                    std::to_string(node),
                                counts.q_count, max_parent_configs);
    }

    counts.joint.assign(counts.q_count * static_cast<std::uint64_t>(counts.r), 0);
    counts.config.assign(counts.q_count, 0);

    const auto& child_col = data.column(node);
    const int n = data.rows();
    if (parents.empty()) {
        for (int k = 0; k < n; ++k) ++counts.joint[static_cast<std::size_t>(child_col[static_cast<std::size_t>(k)])];
        counts.config[0] = n;
        return counts;
    }

    std::vector<const std::vector<int>*> parent_cols;
    parent_cols.reserve(parents.size());
    for (int p : parents) parent_cols.push_back(&data.column(p));
    std::vector<int> strides(parents.size());
    {
        std::uint64_t stride = 1;
        for (std::size_t t = parents.size(); t-- > 0;) {
            strides[t] = static_cast<int>(stride);
            stride *= static_cast<std::uint64_t>(data.arity(parents[t]));
        }
    }
    for (int k = 0; k < n; ++k) {
        std::uint64_t cfg = 0;
        for (std::size_t t = 0; t < parents.size(); ++t)
            cfg += static_cast<std::uint64_t>((*parent_cols[t])[static_cast<std::size_t>(k)]) *
                   static_cast<std::uint64_t>(strides[t]);
        ++counts.joint[cfg * static_cast<std::uint64_t>(counts.r) +
                       static_cast<std::uint64_t>(child_col[static_cast<std::size_t>(k)])];
        ++counts.config[cfg];
    }
    return counts;
}

namespace detail {

double bdeu_from_counts(const FamilyCounts& counts, double ess) {
    if (!(ess > 0.0)) throw ValidationError("bdeu: ess must be > 0");
    const double alpha_config = ess / static_cast<double>(counts.q_count);
    const double alpha_cell = alpha_config / static_cast<double>(counts.r);
    const double lg_config = log_gamma(alpha_config);
    const double lg_cell = log_gamma(alpha_cell);

    double total = 0.0;
    for (std::uint64_t j = 0; j < counts.q_count; ++j) {
        const std::int64_t nj = counts.config[j];
        if (nj == 0) continue;  // empty configurations contribute exactly 0
        total += lg_config - log_gamma(alpha_config + static_cast<double>(nj));
        const std::int64_t* cell = &counts.joint[j * static_cast<std::uint64_t>(counts.r)];
        for (int k = 0; k < counts.r; ++k) {
            if (cell[k] == 0) continue;
            total += log_gamma(alpha_cell + static_cast<double>(cell[k])) - lg_cell;
        }
    }
    return total;
}

double bic_from_counts(const FamilyCounts& counts, std::int64_t n_rows) {
    double loglik = 0.0;
    for (std::uint64_t j = 0; j < counts.q_count; ++j) {
        const std::int64_t nj = counts.config[j];
        if (nj == 0) continue;  // unobserved configurations contribute 0
        const std::int64_t* cell = &counts.joint[j * static_cast<std::uint64_t>(counts.r)];
        const double log_nj = std::log(static_cast<double>(nj));
        for (int k = 0; k < counts.r; ++k) {
            if (cell[k] == 0) continue;  // 0 * ln 0 = 0
            loglik += static_cast<double>(cell[k]) *
                      (std::log(static_cast<double>(cell[k])) - log_nj);
        }
    }
    const double free_params =
        static_cast<double>(counts.q_count) * static_cast<double>(counts.r - 1);
    return loglik - 0.5 * free_params * std::log(static_cast<double>(n_rows));
}

}  // namespace detail

double bdeu_family_loglik(const Dataset& data, int node, std::span<const int> parents,
                          double ess, std::uint64_t max_parent_configs) {
    FamilyCounts counts = count_family(data, node, parents, max_parent_configs);
    return detail::bdeu_from_counts(counts, ess);
}

double bic_cpt_family(const Dataset& data, int node, std::span<const int> parents,
                      std::uint64_t max_parent_configs) {
    FamilyCounts counts = count_family(data, node, parents, max_parent_configs);
    return detail::bic_from_counts(counts, data.rows());
}

double structure_log_prior(int arc_count, double kappa) {
    if (arc_count < 0) throw ValidationError("structure_log_prior: negative arc count");
    if (!(kappa > 0.0)) throw ValidationError("structure_log_prior: kappa must be > 0");
    if (arc_count == 0) return 0.0;
    return static_cast<double>(arc_count) * std::log(kappa);
}

FamilyScore family_score(const Dataset& data, int node, std::span<const int> parents,
                         const ScoreConfig& config) {
    config.validate();
    double data_term = 0.0;
    switch (config.family) {
        case ScoreFamily::BdeuExact:
            data_term = bdeu_family_loglik(data, node, parents, config.ess,
                                           config.max_parent_configs);
            break;
        case ScoreFamily::BicCpt:
            data_term = bic_cpt_family(data, node, parents, config.max_parent_configs);
            break;
        case ScoreFamily::BicNoisyOr:
            data_term = noisyor_bic_family(data, node, parents, config.noisyor_tol,
                                           config.noisyor_max_iter);
            break;
    }
    FamilyScore out;
    out.node = node;
    out.parent_set.assign(parents.begin(), parents.end());
    out.log_score =
        data_term + structure_log_prior(static_cast<int>(parents.size()), config.kappa);
    return out;
}

}  // namespace arcconf
