#include <benchmark/benchmark.h>

#include "vortex/field_sim.hpp"
#include "vortex/mc_oracle.hpp"
#include "vortex/quadrature.hpp"
#include "vortex/rates.hpp"

namespace {

using namespace vortex;

const Spectrum& blackbody() {
  static const Spectrum s(Blackbody{1.0, 1.0}, Dimension::three);
  return s;
}

const Spectrum& special() {
  static const Spectrum s(SpecialDispersion{1.0, 1.0}, Dimension::two);
  return s;
}

void BM_Moments(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(moments(blackbody()));
}
BENCHMARK(BM_Moments);

void BM_ClosedForm3D(benchmark::State& state) {
  const SpectralMoments m = moments(blackbody());
  for (auto _ : state) benchmark::DoNotOptimize(rates_3d(m));
}
BENCHMARK(BM_ClosedForm3D);

void BM_BuildModel3D(benchmark::State& state) {
  const SpectralMoments m = moments(blackbody());
  for (auto _ : state) benchmark::DoNotOptimize(build_3d(m));
}
BENCHMARK(BM_BuildModel3D);

void BM_ContourUp(benchmark::State& state) {
  const ContourConstants c = contour_constants(build_3d(moments(blackbody())));
  for (auto _ : state) benchmark::DoNotOptimize(contour_integral(c, {}, ContourShift::up));
}
BENCHMARK(BM_ContourUp)->Unit(benchmark::kMicrosecond);

void BM_Reduced3D(benchmark::State& state) {
  const CorrelationModel3D m = build_3d(moments(blackbody()));
  for (auto _ : state) benchmark::DoNotOptimize(reduced_integral_3d(m));
}
BENCHMARK(BM_Reduced3D)->Unit(benchmark::kMillisecond);

void BM_Reduced2D(benchmark::State& state) {
  const CorrelationModel2D m = build_2d(moments(special()));
  for (auto _ : state) benchmark::DoNotOptimize(reduced_integral_2d(m));
}
BENCHMARK(BM_Reduced2D)->Unit(benchmark::kMillisecond);

void BM_MonteCarlo3D(benchmark::State& state) {
  const CorrelationModel3D m = build_3d(moments(blackbody()));
  McConfig cfg;
  cfg.n_samples = static_cast<std::uint64_t>(state.range(0));
  cfg.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(mc_rate_3d(m, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarlo3D)->Arg(100'000)->Unit(benchmark::kMillisecond);

void BM_FieldJet(benchmark::State& state) {
  const FieldRealization f = synthesize(blackbody(), static_cast<std::size_t>(state.range(0)), 3);
  const Eigen::Vector3d r(0.1, 0.2, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(f.jet(r, 0.5));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FieldJet)->Arg(200);

void BM_FindEvents2D(benchmark::State& state) {
  const SpectralMoments m = moments(special());
  const FieldRealization f = synthesize(special(), 200, 4);
  const SpacetimeBox box = default_box(m, 2.0, 1.0);
  const GridSpec grid = default_grid(m);
  for (auto _ : state) benchmark::DoNotOptimize(find_events_2d(f, box, grid));
}
BENCHMARK(BM_FindEvents2D)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
