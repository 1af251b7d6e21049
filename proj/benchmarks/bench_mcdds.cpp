#include "mcdds/ecm_diffusion.hpp"
#include "mcdds/estimation.hpp"
#include "mcdds/pk_lti.hpp"
#include "mcdds/receiver.hpp"

#include <benchmark/benchmark.h>

using namespace mcdds;

static void BM_Convolve(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const TimeGrid grid(0.0, 1e-3, n, units::hour);
    const TimeSeries f = pk::g1_impulse_response(pk::G1Params{}, pk::kReferenceDoseMg, grid);
    const TimeSeries g = pk::g3_impulse_kernel(pk::G3Params{}, grid);
    for (auto _ : state) benchmark::DoNotOptimize(pk::convolve(f, g));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Convolve)->RangeMultiplier(2)->Range(1 << 10, 1 << 13)->Complexity(benchmark::oNSquared);

static void BM_Erfc(benchmark::State& state) {
    double x = -6.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ecm::erfc(x));
        x = x > 6.0 ? -6.0 : x + 1e-3;
    }
}
BENCHMARK(BM_Erfc);

static void BM_SuperposeSource(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const TimeSeries src(TimeGrid(0.0, 10.0, n, units::second), std::vector<double>(n, 1e12),
                         units::molecules);
    for (auto _ : state) benchmark::DoNotOptimize(ecm::superpose_source(src, ecm::EcmParams{}, 1000.0));
}
BENCHMARK(BM_SuperposeSource)->Arg(1080)->Arg(4320);

static void BM_PoissonDraw(benchmark::State& state) {
    const double lambda = static_cast<double>(state.range(0));
    Rng rng(RngSeed{1});
    for (auto _ : state) benchmark::DoNotOptimize(rx::sample_arrivals(lambda, rng));
}
BENCHMARK(BM_PoissonDraw)->Arg(4)->Arg(100)->Arg(1'000'000'000);

static void BM_FitG1(benchmark::State& state) {
    const pk::G1Params truth;
    const auto data = fit::simulate_observations(truth, 125.0, fit::dense_early_schedule(), 0.01, RngSeed{1});
    const pk::G1Params init{1.2 * truth.k, 0.8 * truth.T1, 1.2 * truth.T2, 0.8 * truth.T0};
    for (auto _ : state) benchmark::DoNotOptimize(fit::fit_g1(data, 125.0, init));
}
BENCHMARK(BM_FitG1)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
