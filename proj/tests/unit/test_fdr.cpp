#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "arcconf/fdr.hpp"
#include "arcconf/random.hpp"
#include "oracles.hpp"

using namespace arcconf;

namespace {

SearchConfig bdeu_config(double kappa, double ess) {
    SearchConfig config;
    config.score.family = ScoreFamily::BdeuExact;
    config.score.kappa = kappa;
    config.score.ess = ess;
    return config;
}

}  // namespace

TEST_CASE("estimator arithmetic: the 0.01 fixture") {
    std::vector<int> nulls{0, 1, 0, 0, 0, 1, 0, 0, 0, 0};  // sum 2
    auto est = make_fdr_estimate(30, nulls, 10, 42);
    REQUIRE(est.fdr_raw.has_value());
    CHECK(*est.fdr_raw == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(*est.expected_ppv == doctest::Approx(0.99).epsilon(1e-15));
    // Identity over the preserved integers.
    long long sum = 0;
    for (int c : est.null_counts) sum += c;
    CHECK(*est.fdr_raw == (1.0 + static_cast<double>(sum)) / est.q_permutations /
                              est.observed_arcs);
}

TEST_CASE("estimator arithmetic: clamping") {
    std::vector<int> nulls(10, 10);  // sum 100
    auto est = make_fdr_estimate(5, nulls, 10, 0);
    CHECK(*est.fdr_raw == doctest::Approx(2.02).epsilon(1e-15));
    CHECK(*est.fdr_clamped == 1.0);
    CHECK(*est.expected_ppv == 0.0);
}

TEST_CASE("estimator arithmetic: no discoveries") {
    auto est = make_fdr_estimate(0, {}, 10, 7);
    CHECK(est.no_discoveries());
    CHECK_FALSE(est.fdr_raw.has_value());
    CHECK_FALSE(est.expected_ppv.has_value());
}

TEST_CASE("smoothing floor: fdr_raw is at least 1/(Q * observed)") {
    RngStream rng({50});
    for (int trial = 0; trial < 50; ++trial) {
        const int observed = 1 + static_cast<int>(rng.next_below(60));
        const int q = 1 + static_cast<int>(rng.next_below(20));
        std::vector<int> nulls(static_cast<std::size_t>(q));
        for (auto& c : nulls) c = static_cast<int>(rng.next_below(5));
        auto est = make_fdr_estimate(observed, nulls, q, 0);
        CHECK(*est.fdr_raw >= 1.0 / (static_cast<double>(q) * observed) - 1e-15);
    }
}

TEST_CASE("permutation preserves the column multiset and the other columns") {
    RngStream data_rng({51});
    Dataset data = oracle::random_dataset(data_rng, 40, {3, 2, 4});
    RngStream rng({52});
    Dataset permuted = permute_column_for_node(data, 2, rng);

    CHECK(permuted.column(0) == data.column(0));
    CHECK(permuted.column(1) == data.column(1));
    std::vector<int> a = data.column(2), b = permuted.column(2);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
}

TEST_CASE("single-row and constant columns permute to themselves") {
    Dataset one({{1}, {0}}, {2, 2}, {}, {0, 1});
    RngStream rng({53});
    CHECK(permute_column_for_node(one, 0, rng).column(0) == one.column(0));

    Dataset constant({{0, 0, 0}, {1, 0, 1}}, {2, 2}, {}, {0, 1});
    CHECK(permute_column_for_node(constant, 0, rng).column(0) == constant.column(0));
}

TEST_CASE("null counts are zero for noise data under a strong prior") {
    RngStream rng({54});
    Dataset data = oracle::random_dataset(rng, 200, {2, 2, 2, 2, 2});
    auto config = bdeu_config(1e-4, 4.0);
    int total = 0;
    for (int replicate = 1; replicate <= 5; ++replicate)
        total += null_arc_count(data, config, 99, replicate);
    CHECK(total <= 1);
}

TEST_CASE("estimate_fdr is deterministic, including null counts") {
    RngStream rng({55});
    Dataset data = oracle::random_dataset(rng, 80, {2, 2, 2, 2});
    auto config = bdeu_config(2.0, 4.0);
    auto a = estimate_fdr(data, config, 5, 1234, 1);
    auto b = estimate_fdr(data, config, 5, 1234, 4);
    CHECK(a.estimate.observed_arcs == b.estimate.observed_arcs);
    CHECK(a.estimate.null_counts == b.estimate.null_counts);
    CHECK(a.model == b.model);
    auto c = estimate_fdr(data, config, 5, 4321, 1);
    // A different seed redraws the nulls (observed model unchanged).
    CHECK(c.model == a.model);
}

TEST_CASE("estimate_fdr reports no discoveries on empty models") {
    RngStream rng({56});
    Dataset data = oracle::random_dataset(rng, 150, {2, 2, 2});
    auto result = estimate_fdr(data, bdeu_config(1e-4, 4.0), 10, 5);
    CHECK(result.estimate.no_discoveries());
    CHECK(result.model.arc_count() == 0);
}

TEST_CASE("sweep: single point equals estimate_fdr and duplicates coincide") {
    RngStream rng({57});
    // Chain data so the learner actually finds arcs.
    std::vector<int> a(120), b(120), c(120);
    for (int i = 0; i < 120; ++i) {
        a[static_cast<std::size_t>(i)] = rng.next_unit() < 0.5;
        b[static_cast<std::size_t>(i)] = rng.next_unit() < 0.1 ? 1 - a[static_cast<std::size_t>(i)] : a[static_cast<std::size_t>(i)];
        c[static_cast<std::size_t>(i)] = rng.next_unit() < 0.1 ? 1 - b[static_cast<std::size_t>(i)] : b[static_cast<std::size_t>(i)];
    }
    Dataset data({a, b, c}, {2, 2, 2}, {}, {0, 1, 2});
    auto config = bdeu_config(0.1, 4.0);

    std::vector<double> grid{0.1};
    auto sweep = fdr_sweep(data, config, grid, 5, 777);
    REQUIRE(sweep.size() == 1);
    REQUIRE(sweep[0].result.has_value());
    auto direct = estimate_fdr(data, config, 5, 777);
    CHECK(sweep[0].result->estimate.observed_arcs == direct.estimate.observed_arcs);
    CHECK(sweep[0].result->estimate.null_counts == direct.estimate.null_counts);

    std::vector<double> dup{0.1, 0.1};
    auto sweep2 = fdr_sweep(data, config, dup, 5, 777);
    REQUIRE(sweep2.size() == 2);
    CHECK(sweep2[0].result->estimate.null_counts == sweep2[1].result->estimate.null_counts);
    CHECK(sweep2[0].result->model == sweep2[1].result->model);
}

TEST_CASE("null calibration: learner discoveries on null data get high fdr") {
    // Truth is the empty graph; every learned arc is false, and whenever the
    // learner reports arcs the estimate should say so.
    int informative = 0, conservative = 0;
    for (int replicate = 0; replicate < 20; ++replicate) {
        RngStream rng({58, static_cast<std::uint64_t>(replicate)});
        std::vector<int> arities(20, 2);
        Dataset data = oracle::random_dataset(rng, 500, arities);
        auto result = estimate_fdr(data, bdeu_config(1.0, 4.0), 10,
                                   1000 + static_cast<std::uint64_t>(replicate));
        if (result.estimate.no_discoveries()) continue;
        ++informative;
        if (*result.estimate.fdr_clamped >= 0.5) ++conservative;
    }
    if (informative > 0) CHECK(conservative * 10 >= informative * 9);
}
