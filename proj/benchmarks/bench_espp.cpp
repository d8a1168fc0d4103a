#include <benchmark/benchmark.h>

#include <random>

#include "espp/data/format.hpp"
#include "espp/data/synth.hpp"
#include "espp/readout.hpp"
#include "espp/rule.hpp"
#include "espp/training.hpp"

using namespace espp;

namespace {

SpikeVector random_spikes(std::mt19937_64& rng, int n, double p) {
    std::bernoulli_distribution on(p);
    SpikeVector v(n);
    for (auto& x : v) x = on(rng) ? 1.0 : 0.0;
    return v;
}

void BM_LifStep(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0)), fan_in = static_cast<int>(state.range(1));
    std::mt19937_64 rng(1);
    const Matrix w = Matrix::Random(n, fan_in) / std::sqrt(static_cast<double>(fan_in));
    const auto x = random_spikes(rng, fan_in, 0.1);
    LifState s(n, 1.0, 0.9);
    for (auto _ : state) benchmark::DoNotOptimize(lif_step(s, w, x));
    state.SetItemsProcessed(state.iterations() * n * fan_in);
}
BENCHMARK(BM_LifStep)->Args({64, 20})->Args({200, 2312})->Args({450, 700});

void BM_AccumulateWeightUpdate(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0)), fan_in = static_cast<int>(state.range(1));
    std::mt19937_64 rng(2);
    const EsppConfig cfg;
    Matrix dst = Matrix::Zero(n, fan_in);
    EchoState echo(n);
    echo.accumulate(random_spikes(rng, n, 0.2));
    finish_sample(echo);
    EligibilityTrace trace(fan_in, 0.9);
    trace_step(trace, random_spikes(rng, fan_in, 0.3));
    const Vector membrane = Vector::Random(n);
    for (auto _ : state) {
        accumulate_weight_update(dst, 1.0, cfg, PairLabel::Fixation, true, membrane, echo, trace);
        benchmark::ClobberMemory();
    }
    state.SetItemsProcessed(state.iterations() * n * fan_in);
}
BENCHMARK(BM_AccumulateWeightUpdate)->Args({64, 20})->Args({200, 2312})->Args({450, 700});

// One phase-1 epoch on the acceptance geometry (5 classes, 20 channels, 50 steps, 2x64 hidden).
void BM_Phase1Epoch(benchmark::State& state) {
    SynthParams p{.n_classes = 5, .channels = 20, .steps = 50, .rate_hi = 0.3, .rate_lo = 0.1,
                  .n_samples = static_cast<std::uint32_t>(state.range(0)), .seed = 1};
    const auto data = synth_generate(p);
    const std::array sizes{64, 64};
    Network net(feed_forward_spec(20, sizes, EsppConfig{.c_pos = 3.0, .learning_rate = 2e-3}), 1);
    Phase1Trainer trainer(net);
    const auto streams = epoch_streams(data, Phase1Options{}, 0);
    int epoch = 0;
    for (auto _ : state) benchmark::DoNotOptimize(trainer.run_epoch(data, streams, epoch++));
    state.SetItemsProcessed(state.iterations() * state.range(0) * p.steps);
}
BENCHMARK(BM_Phase1Epoch)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_CollectFeatures(benchmark::State& state) {
    SynthParams p{.n_classes = 5, .channels = 20, .steps = 50, .n_samples = 200, .seed = 1};
    const auto data = synth_generate(p);
    const std::array sizes{64, 64};
    Network net(feed_forward_spec(20, sizes, EsppConfig{}, ReadoutWiring::AllLayers), 1);
    const auto pops = net.spec().readout_populations();
    for (auto _ : state)
        benchmark::DoNotOptimize(collect_dataset_features(net, data, pops, static_cast<unsigned>(state.range(0))));
}
BENCHMARK(BM_CollectFeatures)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_DecodeEspk(benchmark::State& state) {
    SynthParams p{.n_classes = 20, .channels = 700, .steps = 100, .rate_hi = 0.05, .rate_lo = 0.01, .n_samples = 200};
    const auto bytes = encode_espk(synth_generate(p));
    for (auto _ : state) benchmark::DoNotOptimize(decode_espk(bytes));
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(bytes.size()));
}
BENCHMARK(BM_DecodeEspk)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
