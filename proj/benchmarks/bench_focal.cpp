// Angular-spectrum quadrature cost versus node count and grid size.
#include <benchmark/benchmark.h>

#include "magnus/focal.hpp"

using namespace magnus;

namespace {

BeamProfile beam() {
  BeamProfile b;
  b.angular_waist = 0.6;
  b.wavelength = 369.5e-9;
  return b;
}

}  // namespace

static void BM_GaussLegendre(benchmark::State& state) {
  const int n = int(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(gauss_legendre(n, 0.0, 3.14159).first[0]);
}
BENCHMARK(BM_GaussLegendre)->Arg(64)->Arg(128)->Arg(256);

static void BM_FocalField(benchmark::State& state) {
  FocalGridSpec spec;
  spec.extent = 0.5e-6;
  spec.points = int(state.range(0));
  spec.theta_nodes = 64;
  spec.phi_nodes = 128;
  spec.verify_quadrature = false;
  for (auto _ : state)
    benchmark::DoNotOptimize(focal_field(beam(), spec).quadrature_residual);
  state.SetItemsProcessed(state.iterations() * state.range(0) *
                          state.range(0));
}
BENCHMARK(BM_FocalField)->Arg(21)->Arg(41)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
