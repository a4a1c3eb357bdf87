#include <benchmark/benchmark.h>

#include "crq/analytic.hpp"
#include "crq/delay_dynamics.hpp"
#include "crq/exact_dynamics.hpp"
#include "crq/kernel_dynamics.hpp"
#include "crq/spectral.hpp"

using namespace crq;

namespace {

LatticeParams ring(int N, double alpha)
{
    LatticeParams p;
    p.N = N;
    p.phi = kPi / 2;
    p.alpha = alpha;
    return p;
}

void BM_BandStructure(benchmark::State& state)
{
    const LatticeParams p = ring(static_cast<int>(state.range(0)), 0.25);
    for (auto _ : state) benchmark::DoNotOptimize(band_structure(p));
}
BENCHMARK(BM_BandStructure)->Arg(102)->Arg(502)->Arg(5002);

void BM_BuildKernel(benchmark::State& state)
{
    const BandStructure b = band_structure(ring(static_cast<int>(state.range(0)), 0.25));
    for (auto _ : state) benchmark::DoNotOptimize(build_kernel(b, 0.02, 200.0));
}
BENCHMARK(BM_BuildKernel)->Arg(102)->Arg(502)->Unit(benchmark::kMillisecond);

void BM_Volterra(benchmark::State& state)
{
    const double t_max = static_cast<double>(state.range(0));
    const MemoryKernel K = build_kernel(band_structure(ring(102, 0.25)), 0.02, t_max);
    for (auto _ : state) benchmark::DoNotOptimize(solve_volterra(K, 0.0, t_max));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Volterra)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond)->Complexity();

void BM_ModespaceEvolve(benchmark::State& state)
{
    const BandStructure b = band_structure(ring(static_cast<int>(state.range(0)), 0.25));
    for (auto _ : state) benchmark::DoNotOptimize(evolve_modespace(b, 10.0, kDefaultExactDt));
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_ModespaceEvolve)->Arg(102)->Arg(502)->Unit(benchmark::kMillisecond);

void BM_RealspaceEvolve(benchmark::State& state)
{
    const LatticeParams p = ring(static_cast<int>(state.range(0)), 0.25);
    for (auto _ : state) benchmark::DoNotOptimize(evolve_realspace(p, 10.0, kDefaultExactDt));
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_RealspaceEvolve)->Arg(102)->Arg(502)->Unit(benchmark::kMillisecond);

void BM_SolveDde(benchmark::State& state)
{
    const FeedbackRates r = feedback_rates(ring(502, 0.01));
    const double t_max = 5.5 * r.T_minus;
    const DelaySpec spec = make_delay_spec(r, t_max);
    for (auto _ : state) benchmark::DoNotOptimize(solve_dde(spec, t_max, default_dde_step(r)));
}
BENCHMARK(BM_SolveDde)->Unit(benchmark::kMillisecond);

void BM_SeriesAmplitude(benchmark::State& state)
{
    const FeedbackRates r = feedback_rates(ring(502, 0.01));
    const double t = 5.5 * r.T_minus;
    for (auto _ : state) benchmark::DoNotOptimize(series_amplitude(r, t));
}
BENCHMARK(BM_SeriesAmplitude);

void BM_Eigenproblem(benchmark::State& state)
{
    const LatticeParams p = ring(static_cast<int>(state.range(0)), 0.25);
    for (auto _ : state) benchmark::DoNotOptimize(solve_eigenproblem(p));
}
BENCHMARK(BM_Eigenproblem)->Arg(102)->Arg(502)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
