#include <algorithm>
#include <cmath>

#include "magnus/constants.hpp"
#include "magnus/errors.hpp"
#include "magnus/gate.hpp"

namespace magnus {

ScalarMaximum maximize_scalar(const std::function<double(double)>& f, double lo,
                              double hi, double x_tol_rel, int max_iter) {
  if (!(hi > lo)) throw ConfigError("search interval is empty");
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  int evals = 2;
  const double scale = std::max({std::abs(lo), std::abs(hi), 1e-300});
  while (b - a > x_tol_rel * scale && evals < max_iter) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  ScalarMaximum best;
  best.evaluations = evals;
  if (fc >= fd) {
    best.x = c;
    best.f = fc;
  } else {
    best.x = d;
    best.f = fd;
  }
  return best;
}

DerivedParams with_delta(DerivedParams dp, double delta) {
  if (!(delta > 0)) throw ConfigError("detuning must be positive");
  dp.delta = delta;
  dp.nu = dp.omega_c + dp.mode_shift + delta;
  dp.tau = 4.0 * constants::pi / delta;
  return dp;
}

CalibrationResult calibrate_delta(const PhysicalConfig& cfg,
                                  const DerivedParams& dp,
                                  const SceneOptions& opt,
                                  const CalibrationOptions& copt) {
  if (!(copt.lo_factor > 0) || !(copt.hi_factor > copt.lo_factor))
    throw ConfigError("calibration window is empty");
  if (copt.coarse_points < 3)
    throw ConfigError("coarse scan needs at least 3 points");

  // Retuning delta moves only the schedule (nu, tau, dt); the operators and
  // their eigendecompositions are shared across the whole search.
  const GateScene scene = build_scene(cfg, dp, {}, opt);
  const SectorPropagator prop(scene);
  const Matrix u_ideal = ideal_zz_gate();

  CalibrationResult result;
  const auto eval = [&](double delta) {
    const double tau = 4.0 * constants::pi / delta;
    const GateSchedule sched{tau, dp.omega_c + dp.mode_shift + delta, 0.0,
                             tau * 1e-4};
    const EchoChannel ch =
        spin_echo_channel(prop, sched, tau, 0.5 * tau, 0, 0);
    const double f = process_fidelity(ch.gram, u_ideal);
    result.samples.emplace_back(delta, f);
    return f;
  };

  const double lo = copt.lo_factor * dp.delta, hi = copt.hi_factor * dp.delta;
  const int n = copt.coarse_points;
  std::vector<double> xs(n), fs(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = lo + (hi - lo) * i / (n - 1);
    fs[i] = eval(xs[i]);
  }

  int peaks = 0, best_i = 0;
  for (int i = 1; i + 1 < n; ++i) {
    if (fs[i] >= fs[i - 1] && fs[i] >= fs[i + 1]) ++peaks;
    if (fs[i] > fs[best_i]) best_i = i;
  }
  if (fs[n - 1] > fs[best_i]) best_i = n - 1;
  const bool interior = best_i > 0 && best_i < n - 1;
  result.unimodal = (peaks == 1) && interior;

  const double bl = xs[std::max(0, best_i - 1)];
  const double bh = xs[std::min(n - 1, best_i + 1)];
  const ScalarMaximum refined =
      maximize_scalar(eval, bl, bh, copt.x_tol_rel, 80);

  result.delta_star = refined.x;
  result.fidelity = refined.f;
  if (fs[best_i] > result.fidelity) {
    result.delta_star = xs[best_i];
    result.fidelity = fs[best_i];
  }
  std::sort(result.samples.begin(), result.samples.end());
  return result;
}

}  // namespace magnus
