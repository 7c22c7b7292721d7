#include <benchmark/benchmark.h>

#include "mfdfa/dfa.hpp"
#include "mfdfa/spectrum.hpp"
#include "mfdfa/synth.hpp"
#include "mfdfa/time_series.hpp"

using namespace mfdfa;

static void BM_fluctuation_surface(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto prof = profile(generate(GeneratorSpec::gaussian_white(n, 1)));
  const auto grid = GridSpec::make_default(n);
  for (auto _ : state) {
    auto surface = fluctuation_surface(prof, grid);
    benchmark::DoNotOptimize(surface.values.data());
  }
}
BENCHMARK(BM_fluctuation_surface)->Arg(1 << 12)->Arg(1 << 14)->Arg(1 << 16)
    ->Unit(benchmark::kMillisecond);

static void BM_segment_variances(benchmark::State& state) {
  const auto prof = profile(generate(GeneratorSpec::gaussian_white(1 << 14, 1)));
  const int scale = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto f2 = segment_variances(prof, scale, 2);
    benchmark::DoNotOptimize(f2.data());
  }
}
BENCHMARK(BM_segment_variances)->Arg(16)->Arg(128)->Arg(1024);

static void BM_fgn_generate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const GeneratorSpec spec = GeneratorSpec::fgn(0.7, n, 42);
  for (auto _ : state) {
    auto ts = generate(spec);
    benchmark::DoNotOptimize(ts.values.data());
  }
}
BENCHMARK(BM_fgn_generate)->Arg(1 << 14)->Arg(1 << 18)->Unit(benchmark::kMillisecond);

static void BM_partition_tau(benchmark::State& state) {
  const auto cascade = generate(GeneratorSpec::binomial_cascade(0.6, 1 << 14, 0));
  std::vector<int> scales;
  for (int s = 8; s <= 4096; s *= 2) scales.push_back(s);
  const auto q = q_grid(-5.0, 5.0, 0.5);
  for (auto _ : state) {
    auto pt = partition_tau(cascade, scales, q);
    benchmark::DoNotOptimize(pt.tau.data());
  }
}
BENCHMARK(BM_partition_tau);

static void BM_full_chain(benchmark::State& state) {
  // surface -> h(q) -> Legendre -> complexity parameters
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto cascade = generate(GeneratorSpec::binomial_cascade(0.6, n, 0));
  const auto prof = profile(cascade);
  GridSpec grid;
  grid.q_values = q_grid(-5.0, 5.0, 0.5);
  grid.detrend_order = 2;
  grid.scales = log_spaced_scales(8, static_cast<int>(n / 5), 30);
  for (auto _ : state) {
    const auto surface = fluctuation_surface(prof, grid);
    const auto hs = fit_hurst(surface, {8, static_cast<int>(n / 5)});
    const auto params =
        fit_spectrum(legendre_transform(hs), SpectrumFitKind::quartic);
    benchmark::DoNotOptimize(&params);
  }
}
BENCHMARK(BM_full_chain)->Arg(1 << 14)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
