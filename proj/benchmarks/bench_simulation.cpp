#include <benchmark/benchmark.h>

#include "sqec/propagation.hpp"
#include "sqec/rng.hpp"

using namespace sqec;

static void BM_sample_shot(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    CodeLayout layout = CodeLayout::build(d);
    NoiseConfig cfg{0.005, d, Basis::Z, 1};
    std::uint64_t shot = 0;
    for (auto _ : state) {
        cfg.seed = rng::shot_seed(1, shot++);
        benchmark::DoNotOptimize(sample_shot(layout, cfg));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_sample_shot)->Arg(5)->Arg(9)->Arg(15)->Arg(33);

static void BM_propagate_backward(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    CodeLayout layout = CodeLayout::build(d);
    NoiseConfig cfg{0.005, d, Basis::Z, 1};
    RawErrorBits raw = sample_shot(layout, cfg);
    for (auto _ : state) benchmark::DoNotOptimize(propagate_backward(raw, layout));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_propagate_backward)->Arg(5)->Arg(9)->Arg(15)->Arg(33);

static void BM_detection_events(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    CodeLayout layout = CodeLayout::build(d);
    NoiseConfig cfg{0.005, d, Basis::Z, 1};
    ErrorVolume vol = propagate_backward(sample_shot(layout, cfg), layout);
    for (auto _ : state) benchmark::DoNotOptimize(detection_events(vol));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_detection_events)->Arg(5)->Arg(9)->Arg(15)->Arg(33);
