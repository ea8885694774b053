#ifndef ARCCONF_RANDOM_HPP
#define ARCCONF_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

#include "arcconf/errors.hpp"

namespace arcconf {

// Deterministic random stream keyed by a list of 64-bit components.
// mt19937_64 and seed_seq are fully specified by the standard, and all
// derived draws below avoid std distributions (whose sequences are
// implementation-defined), so a given key yields the same values on any
// platform. Reproducibility contracts throughout the library are built on
// stream keys like (seed, replicate, node).
class RngStream {
public:
    explicit RngStream(std::initializer_list<std::uint64_t> key) { reseed(key); }
    explicit RngStream(std::span<const std::uint64_t> key) { reseed(key); }

    void reseed(std::span<const std::uint64_t> key) {
        std::vector<std::uint32_t> words;
        words.reserve(key.size() * 2);
        for (std::uint64_t k : key) {
            words.push_back(static_cast<std::uint32_t>(k & 0xffffffffULL));
            words.push_back(static_cast<std::uint32_t>(k >> 32));
        }
        std::seed_seq seq(words.begin(), words.end());
        engine_.seed(seq);
    }
    void reseed(std::initializer_list<std::uint64_t> key) {
        reseed(std::span<const std::uint64_t>(key.begin(), key.size()));
    }

    std::uint64_t next_u64() { return engine_(); }

    // Unbiased draw in [0, n) by rejection.
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) throw NumericError("next_below: empty range");
        const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Fisher-Yates shuffle; sequence of swaps is pinned here rather than
    // delegated to std::shuffle so results are portable.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Index draw from nonnegative weights (need not be normalized).
    std::size_t next_weighted(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0)) throw NumericError("next_weighted: weights sum to zero");
        double u = next_unit() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        return weights.empty() ? 0 : weights.size() - 1;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace arcconf

#endif  // ARCCONF_RANDOM_HPP
