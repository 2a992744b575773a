#include <benchmark/benchmark.h>

#include <cmath>

#include "isoplan/activations.hpp"
#include "isoplan/planner.hpp"
#include "isoplan/quadrature.hpp"
#include "isoplan/signal.hpp"

namespace {

void BM_GaussianMomentTanh(benchmark::State& state) {
    const double q = static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            isoplan::gaussian_moment([](double x) { return std::tanh(x) * std::tanh(x); }, q));
    }
}
BENCHMARK(BM_GaussianMomentTanh)->Arg(1)->Arg(100);

void BM_MomentsClosedSelu(benchmark::State& state) {
    const auto act = isoplan::Activation::selu();
    for (auto _ : state) benchmark::DoNotOptimize(isoplan::moments(act, 1.3));
}
BENCHMARK(BM_MomentsClosedSelu);

void BM_PropagateQ(benchmark::State& state) {
    isoplan::NetConfig config;
    config.depth = static_cast<std::size_t>(state.range(0));
    config.sigma_b2 = 0.1;
    const auto act = isoplan::Activation::tanh();
    for (auto _ : state) benchmark::DoNotOptimize(isoplan::propagate_q(config, act));
}
BENCHMARK(BM_PropagateQ)->Arg(10)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_PlanSearchTanh(benchmark::State& state) {
    isoplan::PlanRequest request;
    request.act = isoplan::Activation::tanh();
    request.sigma_b2 = 0.1;
    for (auto _ : state) benchmark::DoNotOptimize(isoplan::plan_sigma(request));
}
BENCHMARK(BM_PlanSearchTanh)->Unit(benchmark::kMillisecond);

}  // namespace
