#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>

namespace magnus {

// Conventions: angular frequencies in rad/s, lengths in metres, and every
// energy divided by hbar so Hamiltonian coefficients also carry rad/s.
struct PhysicalConfig {
  double ion_mass;        // kg
  double wavelength;      // m, tweezer light
  double detuning;        // rad/s, red detuning from the dipole transition
  double linewidth;       // 1/s, natural linewidth of that transition
  double trap_freq;       // rad/s, RF confinement along the tweezer axis
  double waist;           // m, 1/e^2 intensity radius at focus
  double power;           // W
  std::optional<double> depth_override;  // rad/s, pins the effective depth
                                         // (exponent-corrected) directly
  int n_ions = 2;
  double qubit_splitting;  // rad/s, Zeeman qubit frequency

  static PhysicalConfig yb174_defaults();
  void validate() const;
};

struct DerivedParams {
  double lambdabar;  // wavelength / 2pi; displacement of the circular wells
  double depth;      // U0, peak depth of one displaced well (rad/s)
  double depth_eff;  // U0 exp(-2 lambdabar^2 / w0^2), curvature-weighted depth
  double waist;      // copied from config for downstream closed forms
  double g;          // spin-dependent force slope, rad/s per m
  double g_tilde;    // resonant drive coupling g l_c / (4 sqrt(N)), rad/s
  double eta_tilde;  // g_tilde / depth_eff
  double omega_tw;   // tweezer curvature frequency, rad/s
  double omega_c;    // in-phase mode (= trap_freq)
  double omega_s;    // out-of-phase mode, filled for two ions, else 0
  double l_c;        // ground-state length of the in-phase mode, m
  double l_s;        // ground-state length of the out-of-phase mode, m
  double delta;      // drive detuning from the pulled mode, rad/s
  double nu;         // drive frequency omega_c + mode_shift + delta
  double tau;        // gate duration 4*pi/delta: one closed loop per echo half
  double mode_shift; // time-averaged tweezer pull on omega_c, rad/s
};

struct ModeStructure {
  Eigen::Vector2d frequencies;    // (omega_c, omega_s)
  Eigen::Matrix2d participation;  // column m holds b_{i,m} for ions i=0,1
  Eigen::Vector2d lengths;        // sqrt(hbar / (2 m omega_m))
};

// Taylor coefficients (orders 0..4) of one tweezer well around the RF null,
// per qubit branch s = +-1, with the focus displaced by eps along the trap
// axis. Branch s sees a Gaussian centred at eps - s*lambdabar.
class PotentialPolynomial {
 public:
  PotentialPolynomial(double depth, double waist, double lambdabar, double eps);

  // rad/s / m^order
  double coefficient(int spin_sign, int order) const;
  double evaluate(int spin_sign, double x) const;
  // The unexpanded displaced Gaussian the coefficients approximate.
  double exact(int spin_sign, double x) const;
  double eps() const { return eps_; }

 private:
  double depth_, waist_, lambdabar_, eps_;
  std::array<std::array<double, 5>, 2> coeff_;  // [branch(+,-)][order]
};

struct ErrorBudget {
  double gamma_ph;            // photon scattering rate at focus, 1/s
  double scatter_probability; // gamma_ph * tau
  double delta_ac;            // differential qubit shift at focus, rad/s
  double mode_shift;          // rad/s
  double omega_eff_slope;     // clock-qubit force slope, rad/s per m
};

DerivedParams derive_params(const PhysicalConfig& cfg);
ModeStructure mode_structure(const PhysicalConfig& cfg);
PotentialPolynomial potential_polynomial(const DerivedParams& dp, double eps);
ErrorBudget error_budget(const PhysicalConfig& cfg, const DerivedParams& dp);

}  // namespace magnus
