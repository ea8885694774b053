#include <benchmark/benchmark.h>

#include "arcconf/bayes.hpp"
#include "arcconf/scoring.hpp"
#include "arcconf/synth.hpp"

namespace {

arcconf::Dataset alarm_data(int rows) {
    return arcconf::sample_cpt_network(arcconf::alarm_network(), rows, 17);
}

void BM_BdeuFamily(benchmark::State& state) {
    const auto data = alarm_data(1000);
    const int n_parents = static_cast<int>(state.range(0));
    std::vector<int> parents;
    for (int p = 0; p < n_parents; ++p) parents.push_back(p);
    const int node = 30;
    for (auto _ : state) {
        benchmark::DoNotOptimize(arcconf::bdeu_family_loglik(data, node, parents, 4.0));
    }
}
BENCHMARK(BM_BdeuFamily)->Arg(0)->Arg(2)->Arg(4)->Arg(6);

void BM_BicCptFamily(benchmark::State& state) {
    const auto data = alarm_data(1000);
    std::vector<int> parents{0, 1, 7};
    for (auto _ : state) {
        benchmark::DoNotOptimize(arcconf::bic_cpt_family(data, 30, parents));
    }
}
BENCHMARK(BM_BicCptFamily);

void BM_ParentSetEnumeration(benchmark::State& state) {
    const auto data = alarm_data(1000);
    arcconf::ScoreConfig config;
    config.kappa = 0.1;
    config.ess = 4.0;
    const int k = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(arcconf::enumerate_parent_posteriors(data, 20, config, k));
    }
}
BENCHMARK(BM_ParentSetEnumeration)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace
