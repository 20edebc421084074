#include <benchmark/benchmark.h>

#include "sqec/matching.hpp"
#include "sqec/rng.hpp"

using namespace sqec;

static void BM_build_graph(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const bool weighted = state.range(1) != 0;
    CodeLayout layout = CodeLayout::build(d);
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_graph(
            layout, d, weighted ? GraphMode::Weighted : GraphMode::Uniform, 0.005));
    }
}
BENCHMARK(BM_build_graph)->Args({5, 0})->Args({5, 1})->Args({9, 0})->Args({9, 1});

static void BM_matching_decode(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const double p = static_cast<double>(state.range(1)) * 1e-3;
    CodeLayout layout = CodeLayout::build(d);
    DecodingGraph graph = build_graph(layout, d, GraphMode::Uniform);

    std::vector<SyndromeVolume> syns;
    for (int s = 0; s < 64; ++s) {
        NoiseConfig cfg{p, d, Basis::Z, rng::shot_seed(7, s)};
        syns.push_back(detection_events(propagate_backward(sample_shot(layout, cfg), layout)));
    }
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(decode(graph, syns[i % syns.size()], Basis::Z));
        ++i;
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_matching_decode)->Args({5, 3})->Args({5, 6})->Args({9, 3})->Args({9, 6});
