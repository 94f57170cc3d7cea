#include <benchmark/benchmark.h>

#include "vpstab/dispersion.hpp"
#include "vpstab/dynamics.hpp"
#include "vpstab/equilibrium.hpp"
#include "vpstab/hilbert.hpp"
#include "vpstab/perturbation.hpp"

using namespace vpstab;

namespace {

const EquilibriumProfile& maxwellian() {
  static const EquilibriumProfile p = make_maxwellian(0, 1);
  return p;
}

const EquilibriumProfile& bimax() {
  static const EquilibriumProfile p = make_bi_maxwellian(1, 1);
  return p;
}

void BM_PvHilbertPoint(benchmark::State& state) {
  const auto& p = maxwellian();
  SampledFunction f(p.grid(), p.f0p_quadrature_samples());
  double u = 0.37;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pv_hilbert(f, u));
    u = -u;
  }
}
BENCHMARK(BM_PvHilbertPoint);

void BM_AnalyzerConstruction(benchmark::State& state) {
  const auto& p = maxwellian();
  for (auto _ : state) {
    Analyzer an(p);
    benchmark::DoNotOptimize(&an);
  }
}
BENCHMARK(BM_AnalyzerConstruction);

void BM_ContourAndWinding(benchmark::State& state) {
  Analyzer an(bimax());
  for (auto _ : state) benchmark::DoNotOptimize(an.winding(0.35));
}
BENCHMARK(BM_ContourAndWinding);

void BM_FindRoots(benchmark::State& state) {
  Analyzer an(bimax());
  for (auto _ : state) benchmark::DoNotOptimize(an.roots(0.35));
}
BENCHMARK(BM_FindRoots);

void BM_PenroseTest(benchmark::State& state) {
  const auto& p = bimax();
  for (auto _ : state) benchmark::DoNotOptimize(penrose_test(p));
}
BENCHMARK(BM_PenroseTest);

void BM_Rk4Unit(benchmark::State& state) {
  const auto& p = bimax();
  const double k = 0.35;
  const double dt = 0.2 / (k * p.grid().v_max());
  for (auto _ : state) {
    auto tr = integrate(make_da_state(p, k), p, dt, 1.0, 1.0);
    benchmark::DoNotOptimize(tr.points.back().norm_f);
  }
}
BENCHMARK(BM_Rk4Unit);

void BM_DestabilizeW11(benchmark::State& state) {
  const auto& p = maxwellian();
  for (auto _ : state) benchmark::DoNotOptimize(destabilize_w11(p, 0.0, 0.05));
}
BENCHMARK(BM_DestabilizeW11);

}  // namespace

BENCHMARK_MAIN();
