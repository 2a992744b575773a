#include <benchmark/benchmark.h>

#include "isoplan/ensemble.hpp"

namespace {

void BM_SampleOrthogonal(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    isoplan::Rng rng(7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            isoplan::sample_weights(isoplan::WeightEnsemble::ScaledOrthogonal, n, 1.0, 10, rng));
    }
}
BENCHMARK(BM_SampleOrthogonal)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

// One trial: forward pass, streamed Jacobian product and SVD.
void BM_SimulateTrial(benchmark::State& state) {
    isoplan::NetConfig config;
    config.width = static_cast<std::size_t>(state.range(0));
    config.depth = 10;
    config.sigma_w2 = 0.25;
    isoplan::SimulationOptions options;
    options.threads = 1;
    const auto act = isoplan::Activation::relu();
    for (auto _ : state) benchmark::DoNotOptimize(isoplan::simulate(config, act, options));
}
BENCHMARK(BM_SimulateTrial)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace
