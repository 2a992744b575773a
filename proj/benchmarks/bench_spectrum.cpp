#include <benchmark/benchmark.h>

#include <complex>

#include "isoplan/spectrum.hpp"

namespace {

void BM_SolveGreenNearEdge(benchmark::State& state) {
    const double c = 0.5;
    const auto edges = isoplan::spectral_edges(c);
    const std::complex<double> z(edges.upper * 0.999, 1e-6);
    for (auto _ : state) benchmark::DoNotOptimize(isoplan::solve_green(z, c));
}
BENCHMARK(BM_SolveGreenNearEdge);

void BM_SolveGreenBulk(benchmark::State& state) {
    const double c = 0.5;
    const std::complex<double> z(1.0, 1e-6);
    for (auto _ : state) benchmark::DoNotOptimize(isoplan::solve_green(z, c));
}
BENCHMARK(BM_SolveGreenBulk);

void BM_SpectralDensity(benchmark::State& state) {
    isoplan::GridSpec grid;
    grid.points = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(isoplan::spectral_density(0.125, 1.0, 1, grid));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SpectralDensity)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_LocateEdgesSkip(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(isoplan::locate_support_edges(0.5, 1.05, 10));
}
BENCHMARK(BM_LocateEdgesSkip)->Unit(benchmark::kMillisecond);

}  // namespace
