#include <cmath>

#include "magnus/constants.hpp"
#include "magnus/errors.hpp"
#include "magnus/gate.hpp"
#include "magnus/random.hpp"

namespace magnus {

MisalignmentScan scan_misalignment(const PhysicalConfig& cfg,
                                   const DerivedParams& dp,
                                   const std::vector<double>& eps_list,
                                   const SceneOptions& opt,
                                   const FidelityOptions& fopt) {
  MisalignmentScan scan;
  scan.eps = eps_list;
  scan.fidelity.reserve(eps_list.size());
  for (const double eps : eps_list) {
    NoiseSettings noise;
    noise.eps = eps;
    // The misaligned potential changes the drive operators themselves, so
    // each point carries its own scene and eigendecomposition.
    const GateScene scene = build_scene(cfg, dp, noise, opt);
    scan.fidelity.push_back(ground_fidelity(scene, fopt));
  }
  return scan;
}

IntensityNoiseScan scan_intensity_noise(const GateScene& scene, double rel_std,
                                        int realisations,
                                        const FidelityOptions& fopt) {
  if (rel_std < 0) throw ConfigError("relative intensity std must be >= 0");
  if (realisations < 1) throw ConfigError("need at least one realisation");

  const SectorPropagator prop(scene);
  const Matrix u_ideal = ideal_zz_gate();
  IntensityNoiseScan scan;
  scan.rel_std = rel_std;
  scan.fidelity.reserve(realisations);

  for (int r = 0; r < realisations; ++r) {
    // One independent field-amplitude deviate per echo half; the optical
    // power, and with it every drive coefficient, scales as (1 + xi)^2.
    GaussianStream stream = realization_stream(scene.seed, r);
    const double xi1 = rel_std * stream.next();
    const double xi2 = rel_std * stream.next();
    const double m1 = std::max(0.0, 1.0 + xi1);
    const double m2 = std::max(0.0, 1.0 + xi2);
    const EchoChannel ch = spin_echo_channel(prop, 0, 0, m1 * m1, m2 * m2);
    scan.fidelity.push_back(process_fidelity(ch.gram, u_ideal, fopt));
  }

  double mean = 0;
  for (const double f : scan.fidelity) mean += 1.0 - f;
  mean /= realisations;
  scan.mean_infidelity = mean;
  double var = 0;
  for (const double f : scan.fidelity) {
    const double d = (1.0 - f) - mean;
    var += d * d;
  }
  scan.std_infidelity =
      realisations > 1 ? std::sqrt(var / (realisations - 1)) : 0.0;
  return scan;
}

TimingScan scan_timing(const GateScene& scene,
                       const std::vector<double>& shifts,
                       bool split_shifted_midpoint,
                       const FidelityOptions& fopt) {
  const SectorPropagator prop(scene);
  const Matrix u_ideal = ideal_zz_gate();
  TimingScan scan;
  scan.shift = shifts;
  scan.fidelity.reserve(shifts.size());
  for (const double shift : shifts) {
    NoiseSettings noise = scene.noise;
    noise.timing_shift = shift;
    noise.split_shifted_midpoint = split_shifted_midpoint;
    const auto [t_total, t_split] = echo_times(scene.schedule, noise);
    const EchoChannel ch =
        spin_echo_channel(prop, scene.schedule, t_total, t_split, 0, 0);
    scan.fidelity.push_back(process_fidelity(ch.gram, u_ideal, fopt));
  }
  return scan;
}

Trajectory phase_space_trajectory(const GateScene& scene, int sector) {
  if (sector < 0 || sector >= kSectors)
    throw ConfigError("sector index out of range");
  const SectorPropagator prop(scene);
  const auto [t_total, t_split] = echo_times(scene.schedule, scene.noise);
  const int dim_s = scene.fock_s_cutoff + 1;
  const double l_c = scene.params.l_c;
  const double l_s = scene.params.l_s;

  Trajectory traj;
  traj.sector = sector;
  const auto record = [&](double t, const Matrix& cols) {
    // <a_c>, <a_s> from the ladder structure; the column ordering is n_c
    // major. Odd spin sectors push only the out-of-phase mode.
    ComplexScalar ac(0, 0), as(0, 0);
    for (int nc = 1; nc <= scene.fock_c_cutoff; ++nc)
      for (int ns = 0; ns < dim_s; ++ns)
        ac += std::conj(cols((nc - 1) * dim_s + ns, 0)) *
              std::sqrt(double(nc)) * cols(nc * dim_s + ns, 0);
    for (int nc = 0; nc <= scene.fock_c_cutoff; ++nc)
      for (int ns = 1; ns < dim_s; ++ns)
        as += std::conj(cols(nc * dim_s + ns - 1, 0)) *
              std::sqrt(double(ns)) * cols(nc * dim_s + ns, 0);
    traj.t.push_back(t);
    traj.x_c.push_back(2.0 * l_c * ac.real());
    traj.p_c.push_back(constants::hbar / l_c * ac.imag());
    traj.x_s.push_back(2.0 * l_s * as.real());
    traj.p_s.push_back(constants::hbar / l_s * as.imag());
  };

  Matrix col = Matrix::Zero(scene.motional_dim(), 1);
  col(0, 0) = 1.0;
  record(0.0, col);
  // First echo half only: one closed loop of the driven mode.
  prop.evolve(sector, scene.schedule, 0.0, t_split, col, 1.0,
              PropagatorKind::split_step, record);
  return traj;
}

}  // namespace magnus
