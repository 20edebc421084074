#include <benchmark/benchmark.h>

#include "sqec/neural.hpp"
#include "sqec/rng.hpp"

using namespace sqec;

static void BM_forward(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const int channels = static_cast<int>(state.range(1));
    const int batch = static_cast<int>(state.range(2));
    CodeLayout layout = CodeLayout::build(d);
    ModelParams model = ModelParams::init(Variant::Classifier, 3, channels, 1);

    Tensor in(batch, model.in_channels, d + 1, layout.rows(), layout.cols());
    for (std::size_t i = 0; i < in.v.size(); ++i)
        in.v[i] = rng::unit(2, rng::Stream::Generic, i);

    for (auto _ : state) benchmark::DoNotOptimize(forward(model, in));
    state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_forward)
    ->Args({7, 32, 1})
    ->Args({7, 32, 32})
    ->Args({7, 128, 1})
    ->Args({11, 128, 1});

static void BM_local_decode(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    CodeLayout layout = CodeLayout::build(d);
    ModelParams model = ModelParams::init(Variant::Classifier, 2, 32, 1);
    NoiseConfig cfg{0.003, d, Basis::Z, 3};
    SyndromeVolume syn = detection_events(propagate_backward(sample_shot(layout, cfg), layout));
    for (auto _ : state) benchmark::DoNotOptimize(local_decode(model, syn, layout, 0.5));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_local_decode)->Arg(7)->Arg(11);
