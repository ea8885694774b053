#ifndef ARCCONF_NOISY_OR_HPP
#define ARCCONF_NOISY_OR_HPP

#include <span>
#include <vector>

#include "arcconf/dataset.hpp"

namespace arcconf {

// Link strengths are optimized as theta = -ln(1 - q); this cap corresponds
// to q = 1 - e^-30, beyond which data cannot distinguish values.
inline constexpr double kNoisyOrThetaMax = 30.0;

// Noisy-OR conditional for one binary child: leak probability q0 plus one
// link probability per parent, keyed by the family's sorted parent set.
struct NoisyOrParams {
    double leak = 0.0;
    std::vector<int> parents;  // sorted ascending
    std::vector<double> link;  // aligned with parents

    double link_for(int parent) const;
    void validate() const;
};

// P(child = 1 | active parents) = 1 - (1 - q0) * prod over active (1 - q).
// Throws ValidationError when an active parent is not part of the family.
double noisyor_prob_active(const NoisyOrParams& params, std::span<const int> active_parents);

// Log likelihood of the child column given the parent columns. Impossible
// observations yield -infinity (a value, not an error). Binary child and
// parents required.
double noisyor_loglik(const NoisyOrParams& params, const Dataset& data, int node,
                      std::span<const int> parents);

// Gradient of the negative log likelihood in theta-space; theta[0] is the
// leak, theta[1 + t] the link for parents[t]. Throws NumericError when a
// y=1 row has eta = 0 (unbounded gradient).
std::vector<double> noisyor_gradient(std::span<const double> theta, const Dataset& data,
                                     int node, std::span<const int> parents);

struct NoisyOrFit {
    NoisyOrParams params;
    double loglik = 0.0;
    double projected_grad_norm = 0.0;
    int iterations = 0;
};

// Maximum-likelihood fit by projected gradient descent on the convex
// negative log likelihood over theta in [0, kNoisyOrThetaMax]^d. The
// certificate is an infinity-norm projected gradient <= tol (coordinates
// pinned at a bound may have a gradient pointing out of the box). Throws
// ConvergenceError with the best iterate when max_iter is exhausted.
NoisyOrFit fit_noisyor_ml(const Dataset& data, int node, std::span<const int> parents,
                          double tol = 1e-8, int max_iter = 10000);

// BIC score of the noisy-OR family: ML log likelihood minus (d/2) ln n
// with d = |parents| + 1 (links plus leak).
double noisyor_bic_family(const Dataset& data, int node, std::span<const int> parents,
                          double tol = 1e-8, int max_iter = 10000);

namespace detail {

// Rows collapsed by active-parent pattern; evaluation and fitting cost then
// scales with distinct patterns rather than rows.
struct NoisyOrGroups {
    struct Group {
        std::vector<int> active;  // theta coordinates (excluding the leak, coord 0)
        std::int64_t n0 = 0;      // rows with child = 0
        std::int64_t n1 = 0;      // rows with child = 1
    };
    std::vector<Group> groups;
    int dim = 1;  // |parents| + 1
    std::int64_t rows = 0;
};

NoisyOrGroups group_noisyor_rows(const Dataset& data, int node, std::span<const int> parents);

double neg_loglik(const NoisyOrGroups& g, std::span<const double> theta);
std::vector<double> neg_loglik_gradient(const NoisyOrGroups& g, std::span<const double> theta);

}  // namespace detail

}  // namespace arcconf

#endif  // ARCCONF_NOISY_OR_HPP
