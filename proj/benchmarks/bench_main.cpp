#include <benchmark/benchmark.h>

#include "spectral/gproc.hpp"
#include "spectral/qform.hpp"
#include "spectral/rng.hpp"

using namespace spectral;

static void BM_PhiloxNormalPair(benchmark::State& state) {
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(normal_pair(42, i++, 7, StreamTag::Synthesis));
}
BENCHMARK(BM_PhiloxNormalPair);

static void BM_QSigma(benchmark::State& state) {
  const SpectralMeasure measures[] = {SpectralMeasure::lebesgue(), SpectralMeasure::comb(), SpectralMeasure::fbm(0.7),
                                      SpectralMeasure::cantor()};
  const SpectralMeasure& s = measures[state.range(0)];
  TestFunction psi = TestFunction::gaussian(0.3, 0.8, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(q_sigma(psi, s));
  state.SetLabel(s.describe());
}
BENCHMARK(BM_QSigma)->DenseRange(0, 3);

static void BM_PointwiseCovariance(benchmark::State& state) {
  SpectralMeasure f = SpectralMeasure::fbm(0.7);
  for (auto _ : state) benchmark::DoNotOptimize(pointwise_covariance(f, 1.3, 0.7));
}
BENCHMARK(BM_PointwiseCovariance);

static void BM_SamplePaths(benchmark::State& state) {
  SpectralMeasure comb = SpectralMeasure::comb();
  auto bins = static_cast<std::size_t>(state.range(0));
  NormalFieldGrid grid = build_grid(comb, static_cast<double>(bins) / 2, bins, BinRule::EqualWidth);
  std::vector<double> times;
  for (int i = 0; i < 64; ++i) times.push_back(0.1 * i);
  for (auto _ : state) benchmark::DoNotOptimize(sample_paths(comb, grid, times, 1024, 1));
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_SamplePaths)->Arg(128)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
