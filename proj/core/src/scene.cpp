#include "magnus/gate.hpp"

#include <cmath>
#include <sstream>

#include "magnus/constants.hpp"
#include "magnus/errors.hpp"

namespace magnus {

double amplitude(double t, double nu, double phi) {
  return 0.5 * (1.0 - std::cos(nu * t + phi));
}

std::array<int, 2> sector_signs(int sector) {
  if (sector < 0 || sector >= kSectors)
    throw ConfigError("sector index out of range");
  // |0> carries sigma_z = +1; sector bits are (ion_i, ion_j).
  return {sector & 2 ? -1 : +1, sector & 1 ? -1 : +1};
}

namespace {

// Positions of the two ions in terms of the shared modes:
//   x_i = l_c b_ic (a_c + a_c+) + l_s b_is (a_s + a_s+),  same for j.
struct ModeGeometry {
  Matrix x_i, x_j;       // position operators on the motional factor
  Eigen::VectorXd h0;    // omega_c n_c + omega_s n_s
};

ModeGeometry mode_geometry(const PhysicalConfig& cfg, const DerivedParams& dp,
                           int dim_c, int dim_s) {
  const ModeStructure ms = mode_structure(cfg);
  const auto [ac, acd] = ladder_ops(dim_c - 1);
  const auto [as, asd] = ladder_ops(dim_s - 1);
  const Matrix xc = kron(Matrix(ac + acd), Matrix::Identity(dim_s, dim_s));
  const Matrix xs = kron(Matrix::Identity(dim_c, dim_c), Matrix(as + asd));

  ModeGeometry g;
  g.x_i = ms.lengths(0) * ms.participation(0, 0) * xc +
          ms.lengths(1) * ms.participation(0, 1) * xs;
  g.x_j = ms.lengths(0) * ms.participation(1, 0) * xc +
          ms.lengths(1) * ms.participation(1, 1) * xs;

  g.h0.resize(dim_c * dim_s);
  for (int nc = 0; nc < dim_c; ++nc)
    for (int ns = 0; ns < dim_s; ++ns)
      g.h0(nc * dim_s + ns) = dp.omega_c * nc + dp.omega_s * ns;
  return g;
}

}  // namespace

GateScene build_scene(const PhysicalConfig& cfg, const DerivedParams& dp,
                      const NoiseSettings& noise, const SceneOptions& opt) {
  return build_scene(cfg, dp, potential_polynomial(dp, noise.eps), noise, opt);
}

GateScene build_scene(const PhysicalConfig& cfg, const DerivedParams& dp,
                      const PotentialPolynomial& poly,
                      const NoiseSettings& noise, const SceneOptions& opt) {
  if (cfg.n_ions != 2)
    throw ConfigError("gate scenes require exactly two ions");
  if (opt.fock_c_cutoff < 2 || opt.fock_s_cutoff < 1)
    throw ConfigError("Fock cutoffs too small to hold any dynamics");
  constexpr int kLargeCutoff = 64;
  GateScene scene;
  if (opt.fock_c_cutoff > kLargeCutoff || opt.fock_s_cutoff > kLargeCutoff) {
    if (!opt.allow_large_cutoffs)
      throw ConfigError(
          "Fock cutoff beyond " + std::to_string(kLargeCutoff) +
          " needs allow_large_cutoffs; dense propagation cost grows as dim^2");
    scene.warnings.push_back("large Fock cutoffs requested; expect minutes to "
                             "hours per fidelity evaluation");
  }

  const int dim_c = opt.fock_c_cutoff + 1;
  const int dim_s = opt.fock_s_cutoff + 1;
  scene.layout = HilbertLayout::two_qubit_two_mode(opt.fock_c_cutoff,
                                                   opt.fock_s_cutoff);
  scene.fock_c_cutoff = opt.fock_c_cutoff;
  scene.fock_s_cutoff = opt.fock_s_cutoff;
  scene.params = dp;
  scene.omega_c = dp.omega_c;
  scene.omega_s = dp.omega_s;
  scene.noise = noise;
  scene.seed = opt.seed;
  scene.schedule = GateSchedule{dp.tau, dp.nu, 0.0, dp.tau * 1e-4};

  const ModeGeometry geo = mode_geometry(cfg, dp, dim_c, dim_s);
  scene.h0_diag = geo.h0;

  // Powers of the truncated position operators; the constant term of the
  // expansion is a global phase and is dropped.
  std::array<Matrix, 5> pow_i, pow_j;
  pow_i[1] = geo.x_i;
  pow_j[1] = geo.x_j;
  for (int k = 2; k <= 4; ++k) {
    pow_i[k] = pow_i[k - 1] * geo.x_i;
    pow_j[k] = pow_j[k - 1] * geo.x_j;
  }

  for (int sector = 0; sector < kSectors; ++sector) {
    const auto signs = sector_signs(sector);
    Matrix v = Matrix::Zero(dim_c * dim_s, dim_c * dim_s);
    for (int k = 1; k <= 4; ++k) {
      v += poly.coefficient(signs[0], k) * pow_i[k] +
           poly.coefficient(signs[1], k) * pow_j[k];
    }
    if ((v - v.adjoint()).norm() > 1e-12 * std::max(1.0, v.norm()))
      throw NumericsError("drive operator lost hermiticity during assembly");
    scene.v_branch[sector] = std::move(v);
  }

  // Coarse leakage estimate: the linear drive pushes the in-phase mode around
  // a loop of radius ~ f/(4 delta); warn when the cutoff leaves no headroom
  // above the largest excursion.
  const ModeStructure ms = mode_structure(cfg);
  double alpha_max = 0.0;
  for (int sector = 0; sector < kSectors; ++sector) {
    const auto signs = sector_signs(sector);
    const double f = ms.lengths(0) * (ms.participation(0, 0) * poly.coefficient(signs[0], 1) +
                                      ms.participation(1, 0) * poly.coefficient(signs[1], 1));
    alpha_max = std::max(alpha_max, std::abs(f) / (2.0 * dp.delta));
  }
  const double needed = alpha_max * alpha_max + 6.0 * alpha_max + 4.0;
  if (opt.fock_c_cutoff < needed) {
    std::ostringstream msg;
    msg << "in-phase cutoff " << opt.fock_c_cutoff
        << " leaves little headroom above the drive excursion (want >= "
        << static_cast<int>(needed) + 1 << "); expect truncation leakage";
    scene.warnings.push_back(msg.str());
  }

  return scene;
}

Operator GateScene::full_hamiltonian(double t) const {
  const int d = motional_dim();
  Matrix h = Matrix::Zero(4 * d, 4 * d);
  const double a = amplitude(t, schedule.nu, schedule.phi);
  for (int sector = 0; sector < kSectors; ++sector) {
    auto block = h.block(sector * d, sector * d, d, d);
    block = a * v_branch[sector];
    block.diagonal() += h0_diag.cast<ComplexScalar>();
  }
  return Operator(layout, std::move(h));
}

}  // namespace magnus
