#include <benchmark/benchmark.h>

#include "selfsim/calculus.hpp"
#include "selfsim/duhamel.hpp"
#include "selfsim/estimates.hpp"
#include "selfsim/fft.hpp"
#include "selfsim/initial_data.hpp"
#include "selfsim/lame_semigroup.hpp"
#include "selfsim/norms.hpp"
#include "selfsim/profile.hpp"

using namespace selfsim;

namespace {

VectorField swirl(int n) {
  HomogeneousData d;
  d.window_inner = 2.0;
  return build_field(d, GridSpec(n, 16.0));
}

void BM_Transform(benchmark::State& st) {
  const VectorField v = swirl(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(transform(v));
}
BENCHMARK(BM_Transform)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Leray(benchmark::State& st) {
  const VectorField v = swirl(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(leray_project(v));
}
BENCHMARK(BM_Leray)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Semigroup(benchmark::State& st) {
  const VectorField v = swirl(64);
  for (auto _ : st) benchmark::DoNotOptimize(apply_semigroup(v, {64.0, 0.5}));
}
BENCHMARK(BM_Semigroup)->Unit(benchmark::kMillisecond);

void BM_Duhamel(benchmark::State& st) {
  const VectorField v = swirl(static_cast<int>(st.range(0)));
  const auto q = DuhamelQuadrature::for_grid(v.grid());
  for (auto _ : st) benchmark::DoNotOptimize(duhamel_apply(v, 16.0, q));
}
BENCHMARK(BM_Duhamel)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ProfileResidual(benchmark::State& st) {
  const VectorField v = swirl(64);
  for (auto _ : st) benchmark::DoNotOptimize(profile_residual(v, 4.0, ModelKind::toy1));
}
BENCHMARK(BM_ProfileResidual)->Unit(benchmark::kMillisecond);

void BM_WeakL3(benchmark::State& st) {
  const VectorField v = swirl(64);
  for (auto _ : st) benchmark::DoNotOptimize(weak_lorentz_norm(v, 3.0));
}
BENCHMARK(BM_WeakL3)->Unit(benchmark::kMillisecond);

void BM_LorentzSplit(benchmark::State& st) {
  const ScalarField g = swirl(64).magnitude();
  for (auto _ : st) benchmark::DoNotOptimize(lorentz_split_check(g, 0.05, 2.5, 5.0, 1.5));
}
BENCHMARK(BM_LorentzSplit)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
