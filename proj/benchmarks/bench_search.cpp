#include <benchmark/benchmark.h>

#include "arcconf/fdr.hpp"
#include "arcconf/search.hpp"
#include "arcconf/synth.hpp"

namespace {

void BM_LearnAlarmStructure(benchmark::State& state) {
    const auto data =
        arcconf::sample_cpt_network(arcconf::alarm_network(), static_cast<int>(state.range(0)), 23);
    arcconf::SearchConfig config;
    config.score.kappa = 0.01;
    config.score.ess = 4.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(arcconf::learn_structure(data, config));
    }
}
BENCHMARK(BM_LearnAlarmStructure)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_NullReplicate(benchmark::State& state) {
    const auto data = arcconf::sample_cpt_network(arcconf::alarm_network(), 1000, 29);
    arcconf::SearchConfig config;
    config.score.kappa = 0.01;
    config.score.ess = 4.0;
    int replicate = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(arcconf::null_arc_count(data, config, 7, ++replicate));
    }
}
BENCHMARK(BM_NullReplicate)->Unit(benchmark::kMillisecond);

}  // namespace
