#include "arcconf/noisy_or.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace arcconf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_binary_family(const Dataset& data, int node, std::span<const int> parents) {
    std::vector<std::string> problems;
    if (node < 0 || node >= data.vars()) {
        problems.push_back("node index " + std::to_string(node) + " out of range");
    } else if (data.arity(node) != 2) {
        problems.push_back("node " + std::to_string(node) + " is not binary (arity " +
                           std::to_string(data.arity(node)) + ")");
    }
    for (std::size_t t = 0; t < parents.size(); ++t) {
        int p = parents[t];
        if (p < 0 || p >= data.vars()) {
            problems.push_back("parent index " + std::to_string(p) + " out of range");
            continue;
        }
        if (data.arity(p) != 2)
            problems.push_back("parent " + std::to_string(p) + " is not binary (arity " +
                               std::to_string(data.arity(p)) + ")");
        if (p == node) problems.push_back("node cannot be its own parent");
        if (t > 0 && parents[t - 1] >= p)
            problems.push_back("parent list must be sorted ascending without duplicates");
    }
    if (!problems.empty()) throw ValidationError("invalid noisy-OR family", problems);
}

double theta_from_q(double q) { return q >= 1.0 ? kNoisyOrThetaMax : -std::log1p(-q); }
double q_from_theta(double theta) { return -std::expm1(-theta); }

}  // namespace

double NoisyOrParams::link_for(int parent) const {
    auto it = std::lower_bound(parents.begin(), parents.end(), parent);
    if (it == parents.end() || *it != parent)
        throw ValidationError("noisy-OR params have no link for parent " + std::to_string(parent));
    return link[static_cast<std::size_t>(it - parents.begin())];
}

void NoisyOrParams::validate() const {
    std::vector<std::string> problems;
    if (!(leak >= 0.0 && leak <= 1.0)) problems.push_back("leak outside [0,1]");
    if (parents.size() != link.size())
        problems.push_back("links not aligned with parents");
    for (std::size_t t = 0; t < link.size(); ++t)
        if (!(link[t] >= 0.0 && link[t] <= 1.0))
            problems.push_back("link for parent " + std::to_string(parents[t]) +
                               " outside [0,1]");
    for (std::size_t t = 1; t < parents.size(); ++t)
        if (parents[t - 1] >= parents[t])
            problems.push_back("parents must be sorted ascending without duplicates");
    if (!problems.empty()) throw ValidationError("invalid noisy-OR params", problems);
}

double noisyor_prob_active(const NoisyOrParams& params, std::span<const int> active_parents) {
    double survive = 1.0 - params.leak;
    for (int p : active_parents) survive *= 1.0 - params.link_for(p);
    return 1.0 - survive;
}

namespace detail {

NoisyOrGroups group_noisyor_rows(const Dataset& data, int node, std::span<const int> parents) {
    require_binary_family(data, node, parents);

    NoisyOrGroups out;
    out.dim = static_cast<int>(parents.size()) + 1;
    out.rows = data.rows();

    const auto& child = data.column(node);
    std::vector<const std::vector<int>*> cols;
    cols.reserve(parents.size());
    for (int p : parents) cols.push_back(&data.column(p));

    if (parents.size() <= 64) {
        std::map<std::uint64_t, std::pair<std::int64_t, std::int64_t>> buckets;
        for (int k = 0; k < data.rows(); ++k) {
            std::uint64_t mask = 0;
            for (std::size_t t = 0; t < parents.size(); ++t)
                if ((*cols[t])[static_cast<std::size_t>(k)]) mask |= 1ull << t;
            auto& b = buckets[mask];
            if (child[static_cast<std::size_t>(k)]) ++b.second;
            else ++b.first;
        }
        for (const auto& [mask, counts] : buckets) {
            NoisyOrGroups::Group g;
            for (std::size_t t = 0; t < parents.size(); ++t)
                if (mask & (1ull << t)) g.active.push_back(static_cast<int>(t) + 1);
            g.n0 = counts.first;
            g.n1 = counts.second;
            out.groups.push_back(std::move(g));
        }
    } else {
        std::map<std::vector<std::uint8_t>, std::pair<std::int64_t, std::int64_t>> buckets;
        std::vector<std::uint8_t> key(parents.size());
        for (int k = 0; k < data.rows(); ++k) {
            for (std::size_t t = 0; t < parents.size(); ++t)
                key[t] = static_cast<std::uint8_t>((*cols[t])[static_cast<std::size_t>(k)]);
            auto& b = buckets[key];
            if (child[static_cast<std::size_t>(k)]) ++b.second;
            else ++b.first;
        }
        for (const auto& [pattern, counts] : buckets) {
            NoisyOrGroups::Group g;
            for (std::size_t t = 0; t < pattern.size(); ++t)
                if (pattern[t]) g.active.push_back(static_cast<int>(t) + 1);
            g.n0 = counts.first;
            g.n1 = counts.second;
            out.groups.push_back(std::move(g));
        }
    }
    return out;
}

double neg_loglik(const NoisyOrGroups& g, std::span<const double> theta) {
    double f = 0.0;
    for (const auto& grp : g.groups) {
        double eta = theta[0];
        for (int c : grp.active) eta += theta[static_cast<std::size_t>(c)];
        if (grp.n0) f += static_cast<double>(grp.n0) * eta;
        if (grp.n1) {
            const double one_minus = -std::expm1(-eta);  // 1 - e^-eta
            if (!(one_minus > 0.0)) return kInf;
            f -= static_cast<double>(grp.n1) * std::log(one_minus);
        }
    }
    return f;
}

std::vector<double> neg_loglik_gradient(const NoisyOrGroups& g, std::span<const double> theta) {
    std::vector<double> grad(static_cast<std::size_t>(g.dim), 0.0);
    for (const auto& grp : g.groups) {
        double eta = theta[0];
        for (int c : grp.active) eta += theta[static_cast<std::size_t>(c)];
        double coeff = static_cast<double>(grp.n0);
        if (grp.n1) {
            const double one_minus = -std::expm1(-eta);
            if (!(one_minus > 0.0))
                throw NumericError("noisy-OR gradient is unbounded: eta = 0 with y = 1 observed");
            const double ratio = std::exp(-eta) / one_minus;
            coeff -= static_cast<double>(grp.n1) * ratio;
        }
        grad[0] += coeff;
        for (int c : grp.active) grad[static_cast<std::size_t>(c)] += coeff;
    }
    return grad;
}

}  // namespace detail

double noisyor_loglik(const NoisyOrParams& params, const Dataset& data, int node,
                      std::span<const int> parents) {
    params.validate();
    if (!std::equal(parents.begin(), parents.end(), params.parents.begin(), params.parents.end()))
        throw ValidationError("noisy-OR params are keyed by a different parent set");
    auto groups = detail::group_noisyor_rows(data, node, parents);
    std::vector<double> theta(static_cast<std::size_t>(groups.dim));
    theta[0] = theta_from_q(params.leak);
    for (std::size_t t = 0; t < params.link.size(); ++t) theta[t + 1] = theta_from_q(params.link[t]);

    // -inf is representable: a y=1 row with eta = 0 has probability zero.
    double f = 0.0;
    for (const auto& grp : groups.groups) {
        bool capped = params.leak >= 1.0;
        double eta = theta[0];
        for (int c : grp.active) {
            eta += theta[static_cast<std::size_t>(c)];
            if (params.link[static_cast<std::size_t>(c - 1)] >= 1.0) capped = true;
        }
        if (grp.n0) {
            if (capped) return -kInf;  // q = 1 somewhere active, yet child = 0 observed
            f -= static_cast<double>(grp.n0) * eta;
        }
        if (grp.n1) {
            const double one_minus = capped ? 1.0 : -std::expm1(-eta);
            if (!(one_minus > 0.0)) return -kInf;
            f += static_cast<double>(grp.n1) * std::log(one_minus);
        }
    }
    return f;
}

std::vector<double> noisyor_gradient(std::span<const double> theta, const Dataset& data,
                                     int node, std::span<const int> parents) {
    if (theta.size() != parents.size() + 1)
        throw ValidationError("theta size must be |parents| + 1");
    for (double t : theta)
        if (!(t >= 0.0)) throw ValidationError("theta coordinates must be >= 0");
    auto groups = detail::group_noisyor_rows(data, node, parents);
    return detail::neg_loglik_gradient(groups, theta);
}

namespace {

// Hessian of the negative log likelihood restricted to `free_coords`.
// Only y=1 groups curve the objective: each contributes
// n1 * s / (1-s)^2 times the outer product of its active-indicator vector,
// with s = e^-eta.
std::vector<double> neg_loglik_hessian_free(const detail::NoisyOrGroups& groups,
                                            std::span<const double> theta,
                                            const std::vector<int>& free_coords) {
    const std::size_t m = free_coords.size();
    std::vector<int> slot(theta.size(), -1);
    for (std::size_t i = 0; i < m; ++i) slot[static_cast<std::size_t>(free_coords[i])] = static_cast<int>(i);

    std::vector<double> h(m * m, 0.0);
    std::vector<int> touched;
    for (const auto& grp : groups.groups) {
        if (!grp.n1) continue;
        double eta = theta[0];
        for (int c : grp.active) eta += theta[static_cast<std::size_t>(c)];
        const double s = std::exp(-eta);
        const double one_minus = -std::expm1(-eta);
        if (!(one_minus > 0.0)) continue;
        const double w = static_cast<double>(grp.n1) * s / (one_minus * one_minus);

        touched.clear();
        if (slot[0] >= 0) touched.push_back(slot[0]);
        for (int c : grp.active)
            if (slot[static_cast<std::size_t>(c)] >= 0) touched.push_back(slot[static_cast<std::size_t>(c)]);
        for (int a : touched)
            for (int b : touched) h[static_cast<std::size_t>(a) * m + static_cast<std::size_t>(b)] += w;
    }
    return h;
}

// Dense Cholesky solve of (H + damping I) d = -g; returns false when the
// factorization breaks down.
bool solve_newton_step(std::vector<double> h, std::vector<double> rhs, std::size_t m,
                       double damping, std::vector<double>& out) {
    for (std::size_t i = 0; i < m; ++i) h[i * m + i] += damping;
    // Cholesky factorization in place.
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = h[i * m + j];
            for (std::size_t k = 0; k < j; ++k) sum -= h[i * m + k] * h[j * m + k];
            if (i == j) {
                if (!(sum > 0.0)) return false;
                h[i * m + i] = std::sqrt(sum);
            } else {
                h[i * m + j] = sum / h[j * m + j];
            }
        }
    }
    // Forward then backward substitution.
    for (std::size_t i = 0; i < m; ++i) {
        double sum = rhs[i];
        for (std::size_t k = 0; k < i; ++k) sum -= h[i * m + k] * rhs[k];
        rhs[i] = sum / h[i * m + i];
    }
    for (std::size_t ii = m; ii-- > 0;) {
        double sum = rhs[ii];
        for (std::size_t k = ii + 1; k < m; ++k) sum -= h[k * m + ii] * rhs[k];
        rhs[ii] = sum / h[ii * m + ii];
    }
    out = std::move(rhs);
    return true;
}

}  // namespace

NoisyOrFit fit_noisyor_ml(const Dataset& data, int node, std::span<const int> parents,
                          double tol, int max_iter) {
    if (!(tol > 0.0)) throw ValidationError("fit_noisyor_ml: tol must be > 0");
    auto groups = detail::group_noisyor_rows(data, node, parents);
    const int dim = groups.dim;

    auto project = [&](std::vector<double>& th) {
        for (double& v : th) v = std::clamp(v, 0.0, kNoisyOrThetaMax);
    };
    auto projected_grad_norm = [&](const std::vector<double>& th,
                                   const std::vector<double>& grad) {
        double norm = 0.0;
        for (int i = 0; i < dim; ++i) {
            double g = grad[static_cast<std::size_t>(i)];
            double t = th[static_cast<std::size_t>(i)];
            if (t <= 0.0) g = std::min(g, 0.0);
            else if (t >= kNoisyOrThetaMax) g = std::max(g, 0.0);
            norm = std::max(norm, std::abs(g));
        }
        return norm;
    };
    auto make_fit = [&](const std::vector<double>& th, double f, double pg, int iters) {
        NoisyOrFit fit;
        fit.params.parents.assign(parents.begin(), parents.end());
        fit.params.leak = q_from_theta(th[0]);
        fit.params.link.resize(parents.size());
        for (std::size_t t = 0; t < parents.size(); ++t)
            fit.params.link[t] = q_from_theta(th[t + 1]);
        fit.loglik = -f;
        fit.projected_grad_norm = pg;
        fit.iterations = iters;
        return fit;
    };

    std::int64_t ones = 0;
    for (const auto& grp : groups.groups) ones += grp.n1;

    if (ones == 0) {
        // All-zero child: the boundary optimum, log likelihood exactly 0.
        NoisyOrFit fit;
        fit.params.parents.assign(parents.begin(), parents.end());
        fit.params.link.assign(parents.size(), 0.0);
        fit.params.leak = 0.0;
        fit.loglik = 0.0;
        fit.projected_grad_norm = 0.0;
        fit.iterations = 0;
        return fit;
    }

    const double n = static_cast<double>(groups.rows);
    std::vector<double> theta(static_cast<std::size_t>(dim), 0.0);
    double p_hat = std::clamp(static_cast<double>(ones) / n, 0.5 / n, 1.0 - 0.5 / n);
    theta[0] = -std::log1p(-p_hat);

    double f = detail::neg_loglik(groups, theta);
    std::vector<double> grad = detail::neg_loglik_gradient(groups, theta);
    double pg_norm = projected_grad_norm(theta, grad);
    double step = 1.0 / n;
    int iter = 0;
    int stalled = 0;

    while (pg_norm > tol && iter < max_iter && stalled < 3) {
        ++iter;
        bool progressed = false;

        // Newton step on the free coordinates (bound coordinates whose
        // gradient points out of the box stay pinned).
        std::vector<int> free_coords;
        for (int i = 0; i < dim; ++i) {
            const double t = theta[static_cast<std::size_t>(i)];
            const double g = grad[static_cast<std::size_t>(i)];
            const bool pinned_low = t <= 0.0 && g >= 0.0;
            const bool pinned_high = t >= kNoisyOrThetaMax && g <= 0.0;
            if (!pinned_low && !pinned_high) free_coords.push_back(i);
        }
        if (!free_coords.empty()) {
            auto h = neg_loglik_hessian_free(groups, theta, free_coords);
            std::vector<double> rhs(free_coords.size());
            double trace = 0.0;
            for (std::size_t i = 0; i < free_coords.size(); ++i) {
                rhs[i] = -grad[static_cast<std::size_t>(free_coords[i])];
                trace += h[i * free_coords.size() + i];
            }
            const double damping = 1e-12 * std::max(1.0, trace) + 1e-14;
            std::vector<double> dir;
            if (solve_newton_step(std::move(h), std::move(rhs), free_coords.size(), damping,
                                  dir)) {
                double t_step = 1.0;
                for (int half = 0; half < 40 && !progressed; ++half) {
                    std::vector<double> cand(theta);
                    for (std::size_t i = 0; i < free_coords.size(); ++i)
                        cand[static_cast<std::size_t>(free_coords[i])] += t_step * dir[i];
                    project(cand);
                    const double f_cand = detail::neg_loglik(groups, cand);
                    if (f_cand <= f + 1e-12 * (1.0 + std::abs(f))) {
                        auto g_cand = detail::neg_loglik_gradient(groups, cand);
                        const double pg_cand = projected_grad_norm(cand, g_cand);
                        if (f_cand < f || pg_cand < pg_norm) {
                            theta.swap(cand);
                            f = f_cand;
                            grad = std::move(g_cand);
                            pg_norm = pg_cand;
                            progressed = true;
                            break;
                        }
                    }
                    t_step *= 0.5;
                }
            }
        }

        if (!progressed) {
            // Fall back to a backtracking projected gradient step.
            for (int half = 0; half < 60; ++half) {
                std::vector<double> cand(theta);
                for (int i = 0; i < dim; ++i)
                    cand[static_cast<std::size_t>(i)] -= step * grad[static_cast<std::size_t>(i)];
                project(cand);
                double decrease = 0.0;
                for (int i = 0; i < dim; ++i)
                    decrease += grad[static_cast<std::size_t>(i)] *
                                (theta[static_cast<std::size_t>(i)] -
                                 cand[static_cast<std::size_t>(i)]);
                const double f_cand = detail::neg_loglik(groups, cand);
                if (f_cand <= f - 1e-4 * decrease && decrease > 0.0) {
                    theta.swap(cand);
                    f = f_cand;
                    grad = detail::neg_loglik_gradient(groups, theta);
                    pg_norm = projected_grad_norm(theta, grad);
                    step *= 2.0;
                    progressed = true;
                    break;
                }
                step *= 0.5;
            }
        }
        if (!progressed) ++stalled;
        else stalled = 0;
    }

    if (pg_norm <= tol) return make_fit(theta, f, pg_norm, iter);
    throw ConvergenceError("noisy-OR fit did not converge", theta, pg_norm, iter);
}

double noisyor_bic_family(const Dataset& data, int node, std::span<const int> parents,
                          double tol, int max_iter) {
    NoisyOrFit fit = fit_noisyor_ml(data, node, parents, tol, max_iter);
    const double d = static_cast<double>(parents.size()) + 1.0;  // links plus leak
    return fit.loglik - 0.5 * d * std::log(static_cast<double>(data.rows()));
}

}  // namespace arcconf
