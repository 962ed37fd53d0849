// Hot paths of the gate simulator: operator assembly, eigensolves, stepping,
// and the fidelity reduction.
#include <benchmark/benchmark.h>

#include "magnus/constants.hpp"
#include "magnus/gate.hpp"
#include "magnus/hilbert.hpp"
#include "magnus/ion.hpp"

using namespace magnus;

namespace {

PhysicalConfig pinned() {
  PhysicalConfig cfg = PhysicalConfig::yb174_defaults();
  cfg.depth_override = 2 * constants::pi * 1.6e6;
  return cfg;
}

GateScene scene_with_cutoffs(int nc, int ns) {
  const auto cfg = pinned();
  SceneOptions opt;
  opt.fock_c_cutoff = nc;
  opt.fock_s_cutoff = ns;
  return build_scene(cfg, derive_params(cfg), {}, opt);
}

}  // namespace

static void BM_Kron(benchmark::State& state) {
  const int n = int(state.range(0));
  const auto [a, adag] = ladder_ops(n);
  const Matrix x = a + adag;
  for (auto _ : state) benchmark::DoNotOptimize(kron(x, x).norm());
  state.SetComplexityN(n);
}
BENCHMARK(BM_Kron)->Arg(8)->Arg(16)->Arg(32)->Complexity();

static void BM_BuildScene(benchmark::State& state) {
  const auto cfg = pinned();
  const auto dp = derive_params(cfg);
  SceneOptions opt;
  opt.fock_c_cutoff = int(state.range(0));
  opt.fock_s_cutoff = int(state.range(0)) / 2;
  for (auto _ : state)
    benchmark::DoNotOptimize(build_scene(cfg, dp, {}, opt).motional_dim());
}
BENCHMARK(BM_BuildScene)->Arg(10)->Arg(18);

static void BM_DriveEigensolve(benchmark::State& state) {
  const auto scene = scene_with_cutoffs(int(state.range(0)),
                                        int(state.range(0)) / 2);
  for (auto _ : state) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(scene.v_branch[0]);
    benchmark::DoNotOptimize(es.eigenvalues().sum());
  }
}
BENCHMARK(BM_DriveEigensolve)->Arg(10)->Arg(18);

static void BM_EchoStep(benchmark::State& state) {
  // one echo half at a coarse dt; dominated by the per-step basis rotations
  auto scene = scene_with_cutoffs(int(state.range(0)),
                                  int(state.range(0)) / 2);
  scene.schedule.dt = scene.schedule.tau / 512;
  const SectorPropagator prop(scene);
  Matrix col = Matrix::Zero(scene.motional_dim(), 1);
  for (auto _ : state) {
    col.setZero();
    col(0, 0) = 1.0;
    prop.evolve(0, scene.schedule, 0.0, scene.schedule.tau / 2, col);
    benchmark::DoNotOptimize(col(0, 0));
  }
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_EchoStep)->Arg(10)->Arg(18);

static void BM_GroundFidelity(benchmark::State& state) {
  auto scene = scene_with_cutoffs(8, 4);
  scene.schedule.dt = scene.schedule.tau / 2048;
  for (auto _ : state)
    benchmark::DoNotOptimize(ground_fidelity(scene));
}
BENCHMARK(BM_GroundFidelity)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
