#include "magnus/ion.hpp"

#include <cmath>
#include <string>

#include "magnus/constants.hpp"
#include "magnus/errors.hpp"

namespace magnus {

namespace {
constexpr double kPi = constants::pi;
constexpr double kTwoPi = constants::two_pi;
}  // namespace

PhysicalConfig PhysicalConfig::yb174_defaults() {
  PhysicalConfig cfg;
  cfg.ion_mass = constants::yb174_mass_u * constants::amu;
  cfg.wavelength = 369.5e-9;
  cfg.detuning = kTwoPi * 15e12;
  cfg.linewidth = 1.23e8;
  cfg.trap_freq = kTwoPi * 1e6;
  cfg.waist = 0.5e-6;
  cfg.power = 156e-6;
  cfg.depth_override = std::nullopt;
  cfg.n_ions = 2;
  cfg.qubit_splitting = kTwoPi * 12.6e9;
  return cfg;
}

void PhysicalConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0))
      throw ConfigError(std::string(name) + " must be positive");
  };
  positive(ion_mass, "ion_mass");
  positive(wavelength, "wavelength");
  positive(detuning, "detuning");
  positive(linewidth, "linewidth");
  positive(trap_freq, "trap_freq");
  positive(waist, "waist");
  if (power < 0.0) throw ConfigError("power must be non-negative");
  if (depth_override && !(*depth_override > 0.0))
    throw ConfigError("depth_override must be positive");
  if (n_ions < 1) throw ConfigError("n_ions must be at least 1");
  positive(qubit_splitting, "qubit_splitting");

  const double lambdabar = wavelength / kTwoPi;
  if (waist <= 2.0 * lambdabar)
    throw PhysicsError(
        "waist must exceed twice the reduced wavelength; the displaced-well "
        "curvature changes sign below that");
  if (detuning < 100.0 * linewidth)
    throw PhysicsError("detuning must be far outside the natural linewidth");
}

DerivedParams derive_params(const PhysicalConfig& cfg) {
  cfg.validate();
  DerivedParams dp{};
  dp.lambdabar = cfg.wavelength / kTwoPi;
  dp.waist = cfg.waist;
  const double w2 = cfg.waist * cfg.waist;
  const double corr = std::exp(-2.0 * dp.lambdabar * dp.lambdabar / w2);

  if (cfg.depth_override) {
    dp.depth_eff = *cfg.depth_override;
    dp.depth = dp.depth_eff / corr;
  } else {
    // Far-detuned dipole depth for the circular component the qubit couples
    // to: two-level expression times the 2/3 line-strength share that a
    // J=1/2 -> J'=1/2 transition puts into each sigma branch.
    const double omega0 = kTwoPi * constants::c_light / cfg.wavelength;
    const double i_peak = 2.0 * cfg.power / (kPi * w2);
    const double u0_joule = (3.0 * kPi * constants::c_light * constants::c_light /
                             (2.0 * omega0 * omega0 * omega0)) *
                            (cfg.linewidth / cfg.detuning) * i_peak * (2.0 / 3.0);
    dp.depth = u0_joule / constants::hbar;
    dp.depth_eff = dp.depth * corr;
  }

  dp.g = 4.0 * dp.depth_eff * dp.lambdabar / w2;
  const double w4 = w2 * w2;
  const double curvature =
      4.0 * (constants::hbar * dp.depth_eff) *
      (w2 - 4.0 * dp.lambdabar * dp.lambdabar) / (cfg.ion_mass * w4);
  dp.omega_tw = std::sqrt(curvature);

  dp.omega_c = cfg.trap_freq;  // centre-of-mass mode is the bare trap frequency
  dp.l_c = std::sqrt(constants::hbar / (2.0 * cfg.ion_mass * dp.omega_c));
  if (cfg.n_ions == 2) {
    const ModeStructure ms = mode_structure(cfg);
    dp.omega_s = ms.frequencies(1);
    dp.l_s = ms.lengths(1);
  } else {
    dp.omega_s = 0.0;
    dp.l_s = 0.0;
  }

  const double sqrt_n = std::sqrt(static_cast<double>(cfg.n_ions));
  dp.g_tilde = dp.g * dp.l_c / (4.0 * sqrt_n);
  dp.eta_tilde = dp.lambdabar * dp.l_c / (sqrt_n * w2);
  dp.delta = kTwoPi * 12.2e3 / sqrt_n;
  // Both tweezers pull on the shared mode; the modulation spends half its
  // time on, so the average curvature added per ion is omega_tw^2/2.
  dp.mode_shift =
      dp.omega_tw * dp.omega_tw / (2.0 * cfg.n_ions * dp.omega_c);
  // The drive detunes from the mode as the experiment sees it, i.e. with the
  // tweezer pull included; against the bare frequency the loops never close.
  dp.nu = dp.omega_c + dp.mode_shift + dp.delta;
  dp.tau = 4.0 * kPi / dp.delta;
  return dp;
}

ModeStructure mode_structure(const PhysicalConfig& cfg) {
  cfg.validate();
  if (cfg.n_ions != 2)
    throw PhysicsError("mode_structure covers exactly two co-trapped ions");

  // Equilibrium spacing from force balance, then the coupled Hessian.
  const double ke2 = constants::e_charge * constants::e_charge /
                     (4.0 * kPi * constants::eps0);
  const double m = cfg.ion_mass;
  const double wx2 = cfg.trap_freq * cfg.trap_freq;
  const double d = std::cbrt(2.0 * ke2 / (m * wx2));
  const double coulomb = 2.0 * ke2 / (m * d * d * d);  // = wx^2 at equilibrium

  Eigen::Matrix2d hessian;
  hessian << wx2 + coulomb, -coulomb, -coulomb, wx2 + coulomb;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(hessian);

  ModeStructure ms;
  for (int k = 0; k < 2; ++k) {
    ms.frequencies(k) = std::sqrt(es.eigenvalues()(k));
    Eigen::Vector2d v = es.eigenvectors().col(k);
    if (v(0) < 0.0) v = -v;
    ms.participation.col(k) = v;
    ms.lengths(k) =
        std::sqrt(constants::hbar / (2.0 * m * ms.frequencies(k)));
  }
  return ms;
}

PotentialPolynomial::PotentialPolynomial(double depth, double waist,
                                         double lambdabar, double eps)
    : depth_(depth), waist_(waist), lambdabar_(lambdabar), eps_(eps) {
  if (std::abs(eps) >= waist / 4.0)
    throw PhysicsError("misalignment beyond waist/4 leaves the expansion range");
  const double w2 = waist * waist;
  for (int b = 0; b < 2; ++b) {
    const double s = (b == 0) ? 1.0 : -1.0;
    const double a = eps - s * lambdabar;  // well centre for this branch
    const double a2 = a * a;
    const double ut = depth * std::exp(-2.0 * a2 / w2);
    auto& c = coeff_[b];
    c[0] = -ut;
    c[1] = 4.0 * ut * (s * lambdabar - eps) / w2;
    c[2] = 2.0 * ut * (w2 - 4.0 * a2) / (w2 * w2);
    c[3] = 8.0 * ut * a * (3.0 * w2 - 4.0 * a2) / (3.0 * w2 * w2 * w2);
    c[4] = -2.0 * ut *
           (3.0 * w2 * w2 - 24.0 * w2 * a2 + 16.0 * a2 * a2) /
           (3.0 * w2 * w2 * w2 * w2);
  }
}

double PotentialPolynomial::coefficient(int spin_sign, int order) const {
  if (spin_sign != 1 && spin_sign != -1)
    throw ConfigError("spin_sign must be +1 or -1");
  if (order < 0 || order > 4) throw ConfigError("polynomial order is 0..4");
  return coeff_[spin_sign == 1 ? 0 : 1][order];
}

double PotentialPolynomial::evaluate(int spin_sign, double x) const {
  const auto& c = coeff_[spin_sign == 1 ? 0 : 1];
  // Horner
  return (((c[4] * x + c[3]) * x + c[2]) * x + c[1]) * x + c[0];
}

double PotentialPolynomial::exact(int spin_sign, double x) const {
  const double s = (spin_sign == 1) ? 1.0 : -1.0;
  const double u = (x - eps_) + s * lambdabar_;
  return -depth_ * std::exp(-2.0 * u * u / (waist_ * waist_));
}

PotentialPolynomial potential_polynomial(const DerivedParams& dp, double eps) {
  return PotentialPolynomial(dp.depth, dp.waist, dp.lambdabar, eps);
}

ErrorBudget error_budget(const PhysicalConfig& cfg, const DerivedParams& dp) {
  ErrorBudget eb{};
  eb.gamma_ph = dp.depth_eff * cfg.linewidth / cfg.detuning;
  eb.scatter_probability = eb.gamma_ph * dp.tau;
  // Clock operation runs two Raman tones, each forming a lattice of the
  // quoted depth, so the differential shift carries a factor of two.
  eb.delta_ac = 2.0 * (cfg.qubit_splitting / cfg.detuning) * dp.depth_eff;
  eb.mode_shift = dp.mode_shift;
  // The two-photon force slope matches the single-beam one.
  eb.omega_eff_slope = dp.g;
  return eb;
}

}  // namespace magnus
