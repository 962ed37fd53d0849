#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "magnus/hilbert.hpp"
#include "magnus/ion.hpp"

namespace magnus {

// Drive envelope: the tweezer intensity is modulated as 2A(t) = 1 - cos(nu t + phi),
// so A ramps smoothly from zero at t = 0 when phi = 0.
double amplitude(double t, double nu, double phi);

struct GateSchedule {
  double tau;  // total gate duration; the echo flip sits at tau/2
  double nu;   // modulation angular frequency, omega_c + delta
  double phi = 0.0;
  double dt;   // integrator step, default tau * 1e-4
};

struct NoiseSettings {
  double eps = 0.0;                // transverse misalignment, common to both ions (m)
  double intensity_rel_std = 0.0;  // std of the per-half field amplitude deviate
  double timing_shift = 0.0;       // added to the total duration (s)
  bool split_shifted_midpoint = true;  // echo at (tau+shift)/2; false keeps the
                                       // flip at the ideal tau/2
};

struct SceneOptions {
  int fock_c_cutoff = 18;
  int fock_s_cutoff = 10;
  bool allow_large_cutoffs = false;
  std::uint64_t seed = 12345;
};

// Spin sectors in two-qubit basis order |00>,|01>,|10>,|11>; sigma_z carries
// eigenvalue +1 on |0>. The drive never mixes sectors, so the full propagator
// is block-diagonal over them and the echo only relabels blocks.
inline constexpr int kSectors = 4;
inline int flipped_sector(int sector) { return 3 - sector; }
std::array<int, 2> sector_signs(int sector);

struct GateScene {
  HilbertLayout layout;
  int fock_c_cutoff = 0, fock_s_cutoff = 0;
  double omega_c = 0, omega_s = 0;
  Eigen::VectorXd h0_diag;                 // motional free precession (rad/s)
  std::array<Matrix, kSectors> v_branch;   // motional drive operator per sector
  GateSchedule schedule{};
  NoiseSettings noise{};
  std::uint64_t seed = 0;
  DerivedParams params{};
  std::vector<std::string> warnings;

  int motional_dim() const { return static_cast<int>(h0_diag.size()); }
  // Full-space H(t)/hbar as a dense operator; intended for property tests,
  // the propagators work sector by sector instead.
  Operator full_hamiltonian(double t) const;
};

GateScene build_scene(const PhysicalConfig& cfg, const DerivedParams& dp,
                      const NoiseSettings& noise = {}, const SceneOptions& opt = {});
// Variant with an explicit potential expansion (misalignment scans, tests).
GateScene build_scene(const PhysicalConfig& cfg, const DerivedParams& dp,
                      const PotentialPolynomial& poly,
                      const NoiseSettings& noise = {}, const SceneOptions& opt = {});

enum class PropagatorKind {
  split_step,   // exact H0 drift interleaved with drive kicks (Strang)
  direct_expm,  // one Hermitian exponential of the full step Hamiltonian
};

struct PropagateOptions {
  PropagatorKind kind = PropagatorKind::split_step;
  double amplitude_scale = 1.0;  // multiplies V wholesale
};

// Evolves full-space states under H(t) = H0 + A(t) V from t0 to t1 (no echo).
std::vector<StateVector> propagate(const GateScene& scene, double t0, double t1,
                                   const std::vector<StateVector>& states,
                                   const PropagateOptions& opt = {});

using StepObserver = std::function<void(double t, const Matrix& columns)>;

// Per-sector propagation engine; diagonalises each V branch once.
class SectorPropagator {
 public:
  explicit SectorPropagator(const GateScene& scene);

  const GateScene& scene() const { return *scene_; }

  // Evolve motional columns attached to `sector` from t0 to t1 under the
  // given schedule. `scale` multiplies the drive (intensity noise).
  void evolve(int sector, const GateSchedule& sched, double t0, double t1,
              Matrix& columns, double scale = 1.0,
              PropagatorKind kind = PropagatorKind::split_step,
              const StepObserver& observer = nullptr) const;

  // Spin-echo evolution for columns starting in `sector`: [0, t_split] in
  // `sector`, then [t_split, t_total] in the flipped sector.
  void echo(int sector, const GateSchedule& sched, Matrix& columns,
            double t_total, double t_split, double scale_first = 1.0,
            double scale_second = 1.0,
            PropagatorKind kind = PropagatorKind::split_step) const;

  double max_drive_eigenvalue() const;

 private:
  const GateScene* scene_;
  std::array<Matrix, kSectors> basis_;      // eigenvectors of each V branch
  std::array<Eigen::VectorXd, kSectors> evals_;
};

struct EchoChannel {
  int n_c = 0, n_s = 0;
  std::array<Vector, kSectors> final_motional;
  // gram(a,b) = <v_a|v_b>; Hermitian, PSD, unit diagonal for unitary dynamics.
  Eigen::Matrix4cd gram;
};

// Echoed gate acting on |sector> x |n_c, n_s>, using the scene's schedule,
// timing-noise settings and optional per-half drive scales.
EchoChannel spin_echo_channel(const SectorPropagator& prop, int n_c, int n_s,
                              double scale_first = 1.0, double scale_second = 1.0);
EchoChannel spin_echo_channel(const GateScene& scene, int n_c, int n_s);
// Fully explicit variant: custom schedule and flip placement (calibration
// retunes tau and nu without rebuilding operators; timing scans move t_total).
EchoChannel spin_echo_channel(const SectorPropagator& prop,
                              const GateSchedule& sched, double t_total,
                              double t_split, int n_c, int n_s,
                              double scale_first = 1.0,
                              double scale_second = 1.0);

// Flip placement implied by a schedule plus timing-noise settings:
// {tau + shift, midpoint or ideal tau/2}.
std::pair<double, double> echo_times(const GateSchedule& sched,
                                     const NoiseSettings& noise);

Matrix ideal_zz_gate();  // exp(-i pi/4 sigma_z x sigma_z)

struct FidelityOptions {
  bool optimize_local_phases = false;  // compensate residual single-qubit Z
};

// Average gate fidelity of the echoed channel against u_ideal: the channel
// conjugates each two-qubit Pauli, traced over the motional factor.
double process_fidelity(const Eigen::Matrix4cd& gram, const Matrix& u_ideal,
                        const FidelityOptions& opt = {});
double process_fidelity(const std::vector<EchoChannel>& channels,
                        const std::vector<double>& weights,
                        const Matrix& u_ideal, const FidelityOptions& opt = {});

double ground_fidelity(const GateScene& scene, const FidelityOptions& opt = {});

std::vector<double> thermal_weights(double nbar, int cutoff);  // unnormalised

struct ThermalOptions {
  double mass_floor = 0.9999;  // include sectors until this much weight
  FidelityOptions fidelity{};
};
struct ThermalResult {
  double fidelity = 0.0;
  double included_mass = 0.0;   // weight actually propagated
  double truncated_mass = 0.0;  // distribution weight beyond the cutoffs
  int sectors_used = 0;
  std::vector<std::string> warnings;
};
ThermalResult thermal_fidelity(const GateScene& scene, double nbar_c,
                               double nbar_s, const ThermalOptions& opt = {});

// Generic golden-section maximiser, exposed so the calibration bracket logic
// is testable on analytic landscapes.
struct ScalarMaximum {
  double x = 0.0;
  double f = 0.0;
  int evaluations = 0;
};
ScalarMaximum maximize_scalar(const std::function<double(double)>& f, double lo,
                              double hi, double x_tol_rel = 1e-4,
                              int max_iter = 80);

struct CalibrationOptions {
  double lo_factor = 0.5, hi_factor = 2.0;  // window around the nominal delta
  double x_tol_rel = 2e-4;
  int coarse_points = 9;
};
struct CalibrationResult {
  double delta_star = 0.0;
  double fidelity = 0.0;
  bool unimodal = true;  // coarse scan showed a single interior peak
  std::vector<std::pair<double, double>> samples;  // (delta, fidelity)
};
// Maximises ground-state fidelity over delta with tau = 4 pi / delta coupled.
CalibrationResult calibrate_delta(const PhysicalConfig& cfg,
                                  const DerivedParams& dp,
                                  const SceneOptions& opt = {},
                                  const CalibrationOptions& copt = {});

// Copy of dp with the drive retuned to a new detuning.
DerivedParams with_delta(DerivedParams dp, double delta);

struct Trajectory {
  int sector = 0;
  std::vector<double> t;            // s
  std::vector<double> x_c, p_c;     // in-phase mode, m / kg m/s
  std::vector<double> x_s, p_s;     // out-of-phase mode
};
// Mode expectation values over the first echo half, motional ground state,
// one series per requested spin sector.
Trajectory phase_space_trajectory(const GateScene& scene, int sector);

struct MisalignmentScan {
  std::vector<double> eps;       // m
  std::vector<double> fidelity;
};
MisalignmentScan scan_misalignment(const PhysicalConfig& cfg,
                                   const DerivedParams& dp,
                                   const std::vector<double>& eps_list,
                                   const SceneOptions& opt = {},
                                   const FidelityOptions& fopt = {});

struct IntensityNoiseScan {
  double rel_std = 0.0;
  std::vector<double> fidelity;  // one entry per realisation
  double mean_infidelity = 0.0;
  double std_infidelity = 0.0;
};
IntensityNoiseScan scan_intensity_noise(const GateScene& scene, double rel_std,
                                        int realisations,
                                        const FidelityOptions& fopt = {});

struct TimingScan {
  std::vector<double> shift;     // s
  std::vector<double> fidelity;
};
TimingScan scan_timing(const GateScene& scene, const std::vector<double>& shifts,
                       bool split_shifted_midpoint = true,
                       const FidelityOptions& fopt = {});

}  // namespace magnus
