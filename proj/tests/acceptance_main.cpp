// Acceptance gate: exercises the production operating point end to end and
// prints one PASS/FAIL line per headline claim, with the measured value and
// the pinned band on each line. Exit status is the number of failed checks.
// Expect roughly ten minutes single-threaded; the fidelity bands are fixed
// reference numbers, not tuned to the current build.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "magnus/constants.hpp"
#include "magnus/focal.hpp"
#include "magnus/gate.hpp"
#include "magnus/ion.hpp"

using namespace magnus;

namespace {

int g_failed = 0;

double now_s() {
  using clk = std::chrono::steady_clock;
  static const clk::time_point t0 = clk::now();
  return std::chrono::duration<double>(clk::now() - t0).count();
}

#if defined(__GNUC__)
__attribute__((format(printf, 1, 2)))
#endif
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

void check(bool ok, const char* id, const std::string& detail) {
  std::printf("[%s] %-3s %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failed;
}

bool within_rel(double value, double target, double rel) {
  return std::abs(value - target) <= rel * std::abs(target);
}

// Largest per-mode coherent-state amplitude along a trajectory sample.
double alpha_at(const Trajectory& tr, const DerivedParams& dp, size_t i) {
  const double a_c = std::hypot(tr.x_c[i] / (2.0 * dp.l_c),
                                tr.p_c[i] * dp.l_c / constants::hbar);
  const double a_s = std::hypot(tr.x_s[i] / (2.0 * dp.l_s),
                                tr.p_s[i] * dp.l_s / constants::hbar);
  return std::max(a_c, a_s);
}

}  // namespace

int main() {
  const double two_pi = constants::two_pi;

  PhysicalConfig cfg = PhysicalConfig::yb174_defaults();
  cfg.depth_override = two_pi * 1.6e6;  // pin the effective depth to 1.6 MHz
  const DerivedParams dp0 = derive_params(cfg);
  const SceneOptions opt;  // production cutoffs 18 / 10

  std::printf("operating point: depth/2pi=%.4g Hz  delta_nominal/2pi=%.1f Hz  "
              "tau=%.1f us  cutoffs %d/%d\n",
              dp0.depth_eff / two_pi, dp0.delta / two_pi, dp0.tau * 1e6,
              opt.fock_c_cutoff, opt.fock_s_cutoff);

  // ---- 1: ground-state fidelity at the calibrated detuning -----------------
  const double t1 = now_s();
  const CalibrationResult cal = calibrate_delta(cfg, dp0, opt);
  const DerivedParams dpc = with_delta(dp0, cal.delta_star);
  const GateScene scene = build_scene(cfg, dpc, {}, opt);
  const double f_ground = ground_fidelity(scene);
  const double dt1 = now_s() - t1;
  {
    const double target = 0.999988;
    const bool ok = f_ground >= 0.9999 && std::abs(f_ground - target) <= 1e-4 &&
                    cal.unimodal && dt1 <= 900.0;
    check(ok, "1",
          fmt("ground fidelity F=%.8f (floor 0.9999, band %.6f+-1e-4), "
              "delta*/2pi=%.1f Hz, %zu evals, unimodal=%d, %.0f s (limit 900)",
              f_ground, target, cal.delta_star / two_pi, cal.samples.size(),
              int(cal.unimodal), dt1));
  }

  // ---- 2: thermal occupation barely moves the fidelity ---------------------
  {
    const ThermalResult th = thermal_fidelity(scene, 0.62, 0.23);
    const double diff = std::abs(th.fidelity - f_ground);
    const bool ok = diff <= 5e-5 && th.included_mass >= 0.99;
    check(ok, "2",
          fmt("thermal fidelity F=%.8f at nbar=(0.62, 0.23), |dF|=%.2e "
              "(limit 5e-5), mass=%.6f (floor 0.99), %d states",
              th.fidelity, diff, th.included_mass, th.sectors_used));
  }

  // ---- 3: error-budget channels land in their bands ------------------------
  {
    const MisalignmentScan mis = scan_misalignment(cfg, dpc, {30e-9}, opt);
    const double inf = 1.0 - mis.fidelity[0];
    check(inf >= 0.9e-3 && inf <= 2.0e-3, "3a",
          fmt("misalignment 30 nm: 1-F=%.3e (band [0.9e-3, 2.0e-3])", inf));
  }
  {
    const IntensityNoiseScan noise = scan_intensity_noise(scene, 0.005, 20);
    const double m = noise.mean_infidelity;
    check(m >= 0.5e-4 && m <= 2.0e-4, "3b",
          fmt("intensity noise 0.5%%: mean 1-F=%.3e over 20 draws "
              "(band [0.5e-4, 2.0e-4]), std=%.2e",
              m, noise.std_infidelity));
  }
  {
    const TimingScan tim = scan_timing(scene, {5e-6, -5e-6});
    const double plus = 1.0 - tim.fidelity[0];
    const double minus = 1.0 - tim.fidelity[1];
    const auto in_band = [](double v) { return v >= 1.4e-4 && v <= 5.4e-4; };
    check(in_band(plus) && in_band(minus), "3c",
          fmt("gate-time offset +-5 us: 1-F=%.3e / %.3e "
              "(band [1.4e-4, 5.4e-4])",
              plus, minus));
  }
  const ErrorBudget budget = error_budget(cfg, dpc);
  {
    const double ratio = budget.scatter_probability / 2.0e-3;
    check(ratio >= 0.5 && ratio <= 2.0, "3d",
          fmt("photon scattering over one gate: gamma*tau=%.3e "
              "(within factor 2 of 2e-3)",
              budget.scatter_probability));
  }

  // ---- 4: closed forms hit their reference values --------------------------
  check(within_rel(dp0.omega_tw, two_pi * 37e3, 0.05), "4a",
        fmt("tweezer curvature frequency %.2f kHz (5%% of 37 kHz)",
            dp0.omega_tw / two_pi / 1e3));
  check(within_rel(dp0.g_tilde, two_pi * 2.1e3 / std::sqrt(2.0), 0.05), "4b",
        fmt("resonant coupling %.3f kHz (5%% of 2.1/sqrt(2) kHz)",
            dp0.g_tilde / two_pi / 1e3));
  check(within_rel(dp0.mode_shift, two_pi * 710.0 / 2.0, 0.10), "4c",
        fmt("mode frequency pull %.1f Hz (10%% of 355 Hz)",
            dp0.mode_shift / two_pi));
  check(within_rel(budget.delta_ac, two_pi * 2.7e3, 0.10), "4d",
        fmt("differential qubit shift %.2f kHz (10%% of 2.7 kHz)",
            budget.delta_ac / two_pi / 1e3));
  check(within_rel(budget.gamma_ph, 13.0, 0.20), "4e",
        fmt("photon scattering rate %.2f 1/s (20%% of 13)", budget.gamma_ph));

  // ---- 5: focal-plane polarisation structure -------------------------------
  {
    const double t5 = now_s();
    BeamProfile beam;
    beam.kind = BeamKind::gaussian;
    beam.angular_waist = 0.6;
    beam.wavelength = cfg.wavelength;
    FocalGridSpec spec;
    spec.extent = 0.4e-6;
    spec.points = 61;
    spec.theta_nodes = 96;
    spec.phi_nodes = 192;
    spec.verify_quadrature = true;
    const FieldGrid grid = focal_field(beam, spec);
    const double lambdabar = beam.wavelength / two_pi;
    const double plus = component_offset(grid, +1);
    const double minus = component_offset(grid, -1);

    beam.kind = BeamKind::laguerre_gaussian_l1;
    const double purity = pi_suppression(focal_field(beam, spec));
    const double dt5 = now_s() - t5;

    const bool ok = within_rel(std::abs(plus), lambdabar, 0.15) &&
                    within_rel(std::abs(minus), lambdabar, 0.15) &&
                    std::abs(plus + minus) <= 0.01 * std::abs(plus) &&
                    purity <= 1.0 / 50.0 && dt5 <= 120.0;
    check(ok, "5",
          fmt("circular-component offsets %+.2f / %+.2f nm vs +-%.2f nm "
              "(15%%, antisymmetric to 1%%), donut pi leakage %.4f "
              "(limit 0.02), %.0f s (limit 120)",
              plus * 1e9, minus * 1e9, lambdabar * 1e9, purity, dt5));
  }

  // ---- 6: structural properties at the production scale --------------------
  {
    GateScene fine = scene;
    fine.schedule.dt *= 0.5;
    const double f_fine = ground_fidelity(fine);
    check(std::abs(f_fine - f_ground) < 1e-6, "6a",
          fmt("halving dt moves F by %.2e (limit 1e-6)",
              std::abs(f_fine - f_ground)));
  }
  {
    const EchoChannel ch = spin_echo_channel(scene, 0, 0);
    double drift = 0.0;
    for (int i = 0; i < 4; ++i)
      drift = std::max(drift, std::abs(std::abs(ch.gram(i, i)) - 1.0));
    check(drift < 1e-10, "6b",
          fmt("state norms drift by %.2e over the gate (limit 1e-10)", drift));
  }
  {
    const Trajectory even = phase_space_trajectory(scene, 0);
    const Trajectory odd = phase_space_trajectory(scene, 1);
    double even_max = 0.0, odd_max = 0.0;
    for (size_t i = 0; i < even.t.size(); ++i)
      even_max = std::max(even_max, alpha_at(even, dpc, i));
    for (size_t i = 0; i < odd.t.size(); ++i)
      odd_max = std::max(odd_max, alpha_at(odd, dpc, i));
    const double closure = alpha_at(even, dpc, even.t.size() - 1);
    const bool ok = closure <= 0.02 * even_max && odd_max * 20.0 <= even_max;
    check(ok, "6c",
          fmt("half-gate loop closes to %.2f%% of alpha_max=%.3f (limit 2%%); "
              "odd-parity drive suppressed %.0fx (floor 20x)",
              100.0 * closure / even_max, even_max, even_max / odd_max));
  }
  {
    const double f_again = ground_fidelity(scene);
    const IntensityNoiseScan a = scan_intensity_noise(scene, 0.005, 5);
    const IntensityNoiseScan b = scan_intensity_noise(scene, 0.005, 5);
    const bool ok =
        f_again == f_ground && a.mean_infidelity == b.mean_infidelity;
    check(ok, "6d",
          fmt("reruns are bit-identical: |dF|=%.1g, noise-scan |dmean|=%.1g",
              std::abs(f_again - f_ground),
              std::abs(a.mean_infidelity - b.mean_infidelity)));
  }

  // ---- 7: fidelity stays high across the depth-swept gate-time range -------
  {
    double f_lo = 0.0, f_hi = 0.0;
    bool uni = true;
    for (double r : {0.7, 1.3}) {
      PhysicalConfig c2 = cfg;
      c2.depth_override = *cfg.depth_override * r;
      const CalibrationResult c = calibrate_delta(c2, derive_params(c2), opt);
      (r < 1.0 ? f_lo : f_hi) = c.fidelity;
      uni = uni && c.unimodal;
    }
    const bool ok =
        f_lo > 0.999 && f_hi > 0.999 && f_ground > 0.999 && uni;
    check(ok, "7",
          fmt("calibrated F across depth x0.7/x1.0/x1.3 = %.6f / %.6f / %.6f "
              "(floor 0.999 each)",
              f_lo, f_ground, f_hi));
  }

  std::printf("%s: %d check(s) failed, %.0f s total\n",
              g_failed == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL", g_failed,
              now_s());
  return g_failed;
}
