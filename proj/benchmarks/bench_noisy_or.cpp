#include <benchmark/benchmark.h>

#include "arcconf/noisy_or.hpp"
#include "arcconf/synth.hpp"

namespace {

arcconf::Dataset bipartite_data(int hla, int peptides, int patients) {
    auto net = arcconf::random_noisyor_network(hla, peptides, 31);
    return arcconf::sample_noisyor_network(net, patients, 37);
}

void BM_NoisyOrFit(benchmark::State& state) {
    const auto data = bipartite_data(20, 5, 102);
    const int n_parents = static_cast<int>(state.range(0));
    std::vector<int> parents;
    for (int p = 0; p < n_parents; ++p) parents.push_back(p);
    const int node = 20;  // first peptide column
    for (auto _ : state) {
        benchmark::DoNotOptimize(arcconf::fit_noisyor_ml(data, node, parents));
    }
}
BENCHMARK(BM_NoisyOrFit)->Arg(1)->Arg(3)->Arg(6);

void BM_BipartiteNodeSearch(benchmark::State& state) {
    const auto data = bipartite_data(70, 140, 102);
    auto config = arcconf::bipartite_noisyor_config(70, 140, 10.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(arcconf::learn_parent_set(data, 70, config));
    }
}
BENCHMARK(BM_BipartiteNodeSearch)->Unit(benchmark::kMillisecond);

}  // namespace
