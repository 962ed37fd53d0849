// Experiment runner: named simulations with JSON configs, CSV/JSON results,
// and a resolved-config sidecar per run.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "magnus/constants.hpp"
#include "magnus/errors.hpp"
#include "magnus/focal.hpp"
#include "magnus/gate.hpp"
#include "magnus/ion.hpp"
#include "magnus/parallel.hpp"
#include "magnus/version.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace magnus;

namespace {

constexpr double tp = constants::two_pi;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// config schema

struct Overrides {
  int fock_c = 18, fock_s = 10;
  bool allow_large_cutoffs = false;
  bool calibrate = true;           // retune delta before the headline run
  double dt_factor = 1e-4;         // integrator step as a fraction of tau
  std::optional<double> delta_hz;  // operating detuning (linear Hz)
  std::vector<double> eps_nm = {0, 5, 10, 15, 20, 25, 30};
  double lambda_rel = 0.005;
  int n_realizations = 20;
  std::vector<double> delta_tau_us = {-5, -2.5, 2.5, 5};
  bool echo_midpoint_shifted = true;
  std::vector<double> depth_scale = {0.7, 0.85, 1.0, 1.15, 1.3};
  double nbar_c = 0.62, nbar_s = 0.23;
  double thermal_mass = 0.9999;
  bool local_phase_opt = false;
  std::vector<int> sectors = {0, 1};
};

struct BeamSettings {
  BeamProfile profile;
  FocalGridSpec grid;
};

struct RunSpec {
  std::string experiment;
  PhysicalConfig cfg;
  Overrides ov;
  BeamSettings beam;
  std::uint64_t seed = 12345;
  std::string output;       // path stem, extension appended per format
  std::string format;       // csv | json
  std::optional<int> threads;
};

void require_keys(const json& j, const std::string& ctx,
                  std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) { known = true; break; }
    if (!known)
      throw ConfigError("unknown key \"" + item.key() + "\" in " + ctx +
                        " (strict parsing; check spelling)");
  }
}

template <typename T>
void read_into(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

void parse_physical(const json& j, PhysicalConfig& cfg) {
  require_keys(j, "\"physical\"",
               {"wavelength_nm", "detuning_thz", "linewidth_mhz",
                "trap_freq_mhz", "waist_um", "power_uw", "depth_mhz",
                "qubit_freq_ghz", "mass_u", "n_ions"});
  double v;
  if (auto it = j.find("wavelength_nm"); it != j.end())
    cfg.wavelength = it->get<double>() * 1e-9;
  if (auto it = j.find("detuning_thz"); it != j.end())
    cfg.detuning = tp * it->get<double>() * 1e12;
  if (auto it = j.find("linewidth_mhz"); it != j.end())
    cfg.linewidth = tp * it->get<double>() * 1e6;
  if (auto it = j.find("trap_freq_mhz"); it != j.end())
    cfg.trap_freq = tp * it->get<double>() * 1e6;
  if (auto it = j.find("waist_um"); it != j.end())
    cfg.waist = it->get<double>() * 1e-6;
  if (auto it = j.find("power_uw"); it != j.end())
    cfg.power = it->get<double>() * 1e-6;
  if (auto it = j.find("depth_mhz"); it != j.end())
    cfg.depth_override = tp * it->get<double>() * 1e6;
  if (auto it = j.find("qubit_freq_ghz"); it != j.end())
    cfg.qubit_splitting = tp * it->get<double>() * 1e9;
  if (auto it = j.find("mass_u"); it != j.end())
    cfg.ion_mass = it->get<double>() * constants::amu;
  (void)v;
  read_into(j, "n_ions", cfg.n_ions);
}

void parse_overrides(const json& j, Overrides& ov) {
  require_keys(j, "\"overrides\"",
               {"fock_c", "fock_s", "allow_large_cutoffs", "calibrate",
                "dt_factor", "delta_hz", "eps_nm", "lambda_rel",
                "n_realizations", "delta_tau_us", "echo_midpoint_shifted",
                "depth_scale", "nbar_c", "nbar_s", "thermal_mass",
                "local_phase_opt", "sectors"});
  read_into(j, "fock_c", ov.fock_c);
  read_into(j, "fock_s", ov.fock_s);
  read_into(j, "allow_large_cutoffs", ov.allow_large_cutoffs);
  read_into(j, "calibrate", ov.calibrate);
  read_into(j, "dt_factor", ov.dt_factor);
  if (auto it = j.find("delta_hz"); it != j.end())
    ov.delta_hz = it->get<double>();
  read_into(j, "eps_nm", ov.eps_nm);
  read_into(j, "lambda_rel", ov.lambda_rel);
  read_into(j, "n_realizations", ov.n_realizations);
  read_into(j, "delta_tau_us", ov.delta_tau_us);
  read_into(j, "echo_midpoint_shifted", ov.echo_midpoint_shifted);
  read_into(j, "depth_scale", ov.depth_scale);
  read_into(j, "nbar_c", ov.nbar_c);
  read_into(j, "nbar_s", ov.nbar_s);
  read_into(j, "thermal_mass", ov.thermal_mass);
  read_into(j, "local_phase_opt", ov.local_phase_opt);
  read_into(j, "sectors", ov.sectors);
  if (ov.dt_factor <= 0 || ov.dt_factor > 0.01)
    throw ConfigError("dt_factor must lie in (0, 0.01]");
  if (ov.nbar_c < 0 || ov.nbar_s < 0)
    throw ConfigError("mean occupations must be nonnegative");
  if (ov.thermal_mass <= 0.5 || ov.thermal_mass >= 1.0)
    throw ConfigError("thermal_mass must lie in (0.5, 1)");
}

void parse_beam(const json& j, BeamSettings& b) {
  require_keys(j, "\"beam\"",
               {"kind", "w_theta", "extent_um", "points", "theta_nodes",
                "phi_nodes", "verify_quadrature"});
  if (auto it = j.find("kind"); it != j.end()) {
    const std::string k = it->get<std::string>();
    if (k == "gaussian")
      b.profile.kind = BeamKind::gaussian;
    else if (k == "lg")
      b.profile.kind = BeamKind::laguerre_gaussian_l1;
    else
      throw ConfigError("beam.kind must be \"gaussian\" or \"lg\", got \"" +
                        k + "\"");
  }
  read_into(j, "w_theta", b.profile.angular_waist);
  if (auto it = j.find("extent_um"); it != j.end())
    b.grid.extent = it->get<double>() * 1e-6;
  read_into(j, "points", b.grid.points);
  read_into(j, "theta_nodes", b.grid.theta_nodes);
  read_into(j, "phi_nodes", b.grid.phi_nodes);
  read_into(j, "verify_quadrature", b.grid.verify_quadrature);
}

const std::set<std::string>& experiment_names();

RunSpec parse_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    require_keys(j, "config root",
                 {"experiment", "physical", "overrides", "beam", "seed",
                  "output", "format", "threads"});
    RunSpec spec;
    spec.cfg = PhysicalConfig::yb174_defaults();
    spec.beam.profile.wavelength = spec.cfg.wavelength;
    spec.beam.grid.extent = 1e-6;
    spec.beam.grid.points = 81;
    if (!j.contains("experiment"))
      throw ConfigError("config is missing the \"experiment\" key");
    spec.experiment = j["experiment"].get<std::string>();
    if (!experiment_names().count(spec.experiment))
      throw ConfigError("unknown experiment \"" + spec.experiment +
                        "\"; see `magnus list-experiments`");
    if (j.contains("physical")) parse_physical(j["physical"], spec.cfg);
    spec.beam.profile.wavelength = spec.cfg.wavelength;
    if (j.contains("overrides")) parse_overrides(j["overrides"], spec.ov);
    if (j.contains("beam")) parse_beam(j["beam"], spec.beam);
    read_into(j, "seed", spec.seed);
    read_into(j, "output", spec.output);
    spec.format = spec.experiment == "error-budget" ? "json" : "csv";
    read_into(j, "format", spec.format);
    if (spec.format != "csv" && spec.format != "json")
      throw ConfigError("format must be \"csv\" or \"json\", got \"" +
                        spec.format + "\"");
    if (j.contains("threads")) spec.threads = j["threads"].get<int>();
    return spec;
  } catch (const json::exception& e) {
    // wrong value type somewhere; nlohmann's message names the mismatch
    throw ConfigError(std::string("config type error: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// result assembly

struct Dataset {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;

  void row(std::initializer_list<json> cells) { rows.emplace_back(cells); }
};

std::string to_csv(const Dataset& d) {
  std::string out;
  for (size_t i = 0; i < d.columns.size(); ++i) {
    if (i) out += ',';
    out += d.columns[i];
  }
  out += '\n';
  for (const auto& r : d.rows) {
    for (size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      const json& c = r[i];
      if (c.is_number_float())
        out += fmt(c.get<double>());
      else if (c.is_string())
        out += c.get<std::string>();
      else
        out += c.dump();
    }
    out += '\n';
  }
  return out;
}

json resolved_config_json(const RunSpec& s) {
  json phys{{"ion_mass_kg", s.cfg.ion_mass},
            {"wavelength_m", s.cfg.wavelength},
            {"detuning_rad_s", s.cfg.detuning},
            {"linewidth_per_s", s.cfg.linewidth},
            {"trap_freq_rad_s", s.cfg.trap_freq},
            {"waist_m", s.cfg.waist},
            {"power_w", s.cfg.power},
            {"qubit_splitting_rad_s", s.cfg.qubit_splitting},
            {"n_ions", s.cfg.n_ions}};
  if (s.cfg.depth_override)
    phys["depth_override_rad_s"] = *s.cfg.depth_override;
  json ov{{"fock_c", s.ov.fock_c},
          {"fock_s", s.ov.fock_s},
          {"allow_large_cutoffs", s.ov.allow_large_cutoffs},
          {"calibrate", s.ov.calibrate},
          {"dt_factor", s.ov.dt_factor},
          {"eps_nm", s.ov.eps_nm},
          {"lambda_rel", s.ov.lambda_rel},
          {"n_realizations", s.ov.n_realizations},
          {"delta_tau_us", s.ov.delta_tau_us},
          {"echo_midpoint_shifted", s.ov.echo_midpoint_shifted},
          {"depth_scale", s.ov.depth_scale},
          {"nbar_c", s.ov.nbar_c},
          {"nbar_s", s.ov.nbar_s},
          {"thermal_mass", s.ov.thermal_mass},
          {"local_phase_opt", s.ov.local_phase_opt},
          {"sectors", s.ov.sectors}};
  if (s.ov.delta_hz) ov["delta_hz"] = *s.ov.delta_hz;
  json beam{{"kind", s.beam.profile.kind == BeamKind::gaussian ? "gaussian"
                                                               : "lg"},
            {"w_theta", s.beam.profile.angular_waist},
            {"extent_um", s.beam.grid.extent * 1e6},
            {"points", s.beam.grid.points},
            {"theta_nodes", s.beam.grid.theta_nodes},
            {"phi_nodes", s.beam.grid.phi_nodes},
            {"verify_quadrature", s.beam.grid.verify_quadrature}};
  return json{{"experiment", s.experiment}, {"physical", phys},
              {"overrides", ov},           {"beam", beam},
              {"seed", s.seed},            {"format", s.format}};
}

json derived_json(const DerivedParams& dp) {
  return json{{"lambdabar_m", dp.lambdabar},
              {"depth_rad_s", dp.depth},
              {"depth_eff_rad_s", dp.depth_eff},
              {"g_rad_s_per_m", dp.g},
              {"g_tilde_rad_s", dp.g_tilde},
              {"omega_tw_rad_s", dp.omega_tw},
              {"omega_c_rad_s", dp.omega_c},
              {"omega_s_rad_s", dp.omega_s},
              {"l_c_m", dp.l_c},
              {"l_s_m", dp.l_s},
              {"delta_rad_s", dp.delta},
              {"tau_s", dp.tau},
              {"mode_shift_rad_s", dp.mode_shift}};
}

// atomic-ish write: no partial primary files on failure
void write_file(const fs::path& path, const std::string& body) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write to " + tmp.string());
    out << body;
    if (!out.flush())
      throw ConfigError("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// experiments

struct Runner {
  const RunSpec& spec;
  json& meta;  // sidecar under assembly

  SceneOptions scene_options() const {
    SceneOptions o;
    o.fock_c_cutoff = spec.ov.fock_c;
    o.fock_s_cutoff = spec.ov.fock_s;
    o.allow_large_cutoffs = spec.ov.allow_large_cutoffs;
    o.seed = spec.seed;
    return o;
  }
  FidelityOptions fidelity_options() const {
    FidelityOptions f;
    f.optimize_local_phases = spec.ov.local_phase_opt;
    return f;
  }

  DerivedParams base_params() const {
    DerivedParams dp = derive_params(spec.cfg);
    if (spec.ov.delta_hz) dp = with_delta(dp, tp * *spec.ov.delta_hz);
    return dp;
  }

  // calibrated (or pass-through) operating point, recorded in the sidecar
  DerivedParams operating_point(const PhysicalConfig& cfg,
                                const DerivedParams& dp) const {
    if (!spec.ov.calibrate) {
      meta["calibration"] = {{"performed", false}};
      return dp;
    }
    const CalibrationResult cal = calibrate_delta(cfg, dp, scene_options());
    meta["calibration"] = {{"performed", true},
                           {"delta_star_rad_s", cal.delta_star},
                           {"fidelity", cal.fidelity},
                           {"unimodal", cal.unimodal},
                           {"evaluations", cal.samples.size()}};
    return with_delta(dp, cal.delta_star);
  }

  GateScene scene_at(const PhysicalConfig& cfg, const DerivedParams& dp,
                     const NoiseSettings& noise = {}) const {
    GateScene scene = build_scene(cfg, dp, noise, scene_options());
    scene.schedule.dt = dp.tau * spec.ov.dt_factor;
    for (const auto& w : scene.warnings) meta["warnings"].push_back(w);
    return scene;
  }

  Dataset run();
};

Dataset Runner::run() {
  Dataset d;
  const std::string& e = spec.experiment;

  if (e == "focal-map") {
    const FieldGrid grid = focal_field(spec.beam.profile, spec.beam.grid);
    d.columns = {"x_m", "z_m", "i_sigma_plus", "i_sigma_minus", "i_pi",
                 "i_total"};
    const int n = int(grid.x.size());
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        const double sp = std::norm(grid.sigma_plus(i, k));
        const double sm = std::norm(grid.sigma_minus(i, k));
        const double pp = std::norm(grid.pi_comp(i, k));
        d.row({grid.x[i], grid.z[k], sp, sm, pp, sp + sm + pp});
      }
    meta["quadrature_residual"] = grid.quadrature_residual;
    meta["pi_suppression"] = pi_suppression(grid);
    if (spec.beam.profile.kind == BeamKind::gaussian) {
      meta["offset_sigma_plus_m"] = component_offset(grid, +1);
      meta["offset_sigma_minus_m"] = component_offset(grid, -1);
    }
    return d;
  }

  const DerivedParams dp0 = base_params();
  meta["derived"] = derived_json(dp0);
  const FidelityOptions fopt = fidelity_options();

  if (e == "fidelity-ground") {
    const DerivedParams dp = operating_point(spec.cfg, dp0);
    const GateScene scene = scene_at(spec.cfg, dp);
    const double f = ground_fidelity(scene, fopt);
    d.columns = {"delta_rad_s", "tau_s", "fidelity"};
    d.row({dp.delta, dp.tau, f});
  } else if (e == "fidelity-thermal") {
    const DerivedParams dp = operating_point(spec.cfg, dp0);
    const GateScene scene = scene_at(spec.cfg, dp);
    ThermalOptions topt;
    topt.mass_floor = spec.ov.thermal_mass;
    topt.fidelity = fopt;
    const ThermalResult th =
        thermal_fidelity(scene, spec.ov.nbar_c, spec.ov.nbar_s, topt);
    for (const auto& w : th.warnings) meta["warnings"].push_back(w);
    d.columns = {"nbar_c", "nbar_s", "fidelity", "included_mass",
                 "truncated_mass", "sectors_used"};
    d.row({spec.ov.nbar_c, spec.ov.nbar_s, th.fidelity, th.included_mass,
           th.truncated_mass, th.sectors_used});
  } else if (e == "gate-time-scan") {
    d.columns = {"depth_scale", "tau_s", "delta_rad_s", "fidelity"};
    for (double r : spec.ov.depth_scale) {
      if (r <= 0) throw ConfigError("depth_scale entries must be positive");
      PhysicalConfig cfg = spec.cfg;
      if (cfg.depth_override)
        cfg.depth_override = *cfg.depth_override * r;
      else
        cfg.power *= r;  // depth is linear in power
      DerivedParams dp = derive_params(cfg);
      if (spec.ov.delta_hz) dp = with_delta(dp, tp * *spec.ov.delta_hz);
      dp = operating_point(cfg, dp);
      const GateScene scene = scene_at(cfg, dp);
      d.row({r, dp.tau, dp.delta, ground_fidelity(scene, fopt)});
    }
  } else if (e == "misalignment-scan") {
    const DerivedParams dp = operating_point(spec.cfg, dp0);
    std::vector<double> eps_m;
    for (double nm : spec.ov.eps_nm) eps_m.push_back(nm * 1e-9);
    const MisalignmentScan scan =
        scan_misalignment(spec.cfg, dp, eps_m, scene_options(), fopt);
    d.columns = {"eps_m", "fidelity"};
    for (size_t i = 0; i < scan.eps.size(); ++i)
      d.row({scan.eps[i], scan.fidelity[i]});
  } else if (e == "intensity-noise-scan") {
    const DerivedParams dp = operating_point(spec.cfg, dp0);
    const GateScene scene = scene_at(spec.cfg, dp);
    const IntensityNoiseScan scan = scan_intensity_noise(
        scene, spec.ov.lambda_rel, spec.ov.n_realizations, fopt);
    d.columns = {"realization", "fidelity"};
    for (size_t i = 0; i < scan.fidelity.size(); ++i)
      d.row({int(i), scan.fidelity[i]});
    meta["mean_infidelity"] = scan.mean_infidelity;
    meta["std_infidelity"] = scan.std_infidelity;
  } else if (e == "timing-scan") {
    const DerivedParams dp = operating_point(spec.cfg, dp0);
    const GateScene scene = scene_at(spec.cfg, dp);
    std::vector<double> shifts;
    for (double us : spec.ov.delta_tau_us) shifts.push_back(us * 1e-6);
    const TimingScan scan =
        scan_timing(scene, shifts, spec.ov.echo_midpoint_shifted, fopt);
    d.columns = {"delta_tau_s", "fidelity"};
    for (size_t i = 0; i < scan.shift.size(); ++i)
      d.row({scan.shift[i], scan.fidelity[i]});
  } else if (e == "error-budget") {
    const DerivedParams dp = operating_point(spec.cfg, dp0);
    const ErrorBudget budget = error_budget(spec.cfg, dp);
    const GateScene scene = scene_at(spec.cfg, dp);
    const double f0 = ground_fidelity(scene, fopt);
    meta["operating_point"] = {
        {"delta_rad_s", dp.delta}, {"tau_s", dp.tau}, {"fidelity", f0}};
    meta["closed_forms"] = {{"gamma_ph_per_s", budget.gamma_ph},
                            {"scatter_probability", budget.scatter_probability},
                            {"delta_ac_rad_s", budget.delta_ac},
                            {"mode_shift_rad_s", budget.mode_shift}};
    d.columns = {"source", "parameter", "value", "infidelity"};
    d.row({"photon-scattering", "gamma_ph_tau", budget.scatter_probability,
           budget.scatter_probability});
    {
      const double eps = 30e-9;
      const MisalignmentScan scan =
          scan_misalignment(spec.cfg, dp, {eps}, scene_options(), fopt);
      d.row({"misalignment", "eps_nm", 30.0, 1.0 - scan.fidelity[0]});
    }
    {
      const IntensityNoiseScan scan = scan_intensity_noise(
          scene, spec.ov.lambda_rel, spec.ov.n_realizations, fopt);
      d.row({"intensity-noise", "lambda_rel", spec.ov.lambda_rel,
             scan.mean_infidelity});
      meta["intensity_std_infidelity"] = scan.std_infidelity;
    }
    {
      const TimingScan scan = scan_timing(scene, {5e-6, -5e-6},
                                          spec.ov.echo_midpoint_shifted, fopt);
      d.row({"timing", "delta_tau_us", 5.0, 1.0 - scan.fidelity[0]});
      d.row({"timing", "delta_tau_us", -5.0, 1.0 - scan.fidelity[1]});
    }
  } else if (e == "trajectories") {
    const DerivedParams dp = operating_point(spec.cfg, dp0);
    const GateScene scene = scene_at(spec.cfg, dp);
    d.columns = {"sector", "t_s", "x_c_m", "p_c_kg_m_s", "x_s_m",
                 "p_s_kg_m_s"};
    for (int s : spec.ov.sectors) {
      const Trajectory tr = phase_space_trajectory(scene, s);
      for (size_t i = 0; i < tr.t.size(); ++i)
        d.row({s, tr.t[i], tr.x_c[i], tr.p_c[i], tr.x_s[i], tr.p_s[i]});
    }
  } else {
    throw ConfigError("unknown experiment \"" + e + "\"");
  }
  return d;
}

// ---------------------------------------------------------------------------
// registry

struct ExperimentInfo {
  const char* name;
  const char* dataset;  // figure/table the output reproduces
  const char* blurb;
};

const std::vector<ExperimentInfo>& registry() {
  static const std::vector<ExperimentInfo> r = {
      {"fidelity-ground", "fig2a",
       "gate fidelity from the motional ground state at one operating point"},
      {"fidelity-thermal", "fig2a",
       "thermally averaged gate fidelity at given mode occupations"},
      {"gate-time-scan", "fig2a",
       "fidelity across gate durations; depth rescaled, drive retuned per "
       "point"},
      {"misalignment-scan", "fig2b",
       "fidelity versus transverse tweezer offset"},
      {"intensity-noise-scan", "table1",
       "fidelity under random per-half intensity deviations"},
      {"timing-scan", "table1", "fidelity under gate-duration offsets"},
      {"error-budget", "table1",
       "systematics and headline noise infidelities in one record"},
      {"trajectories", "figS2",
       "in-phase-mode phase-space path over the first echo half"},
      {"focal-map", "figS1",
       "polarisation-resolved focal-plane intensity maps"},
  };
  return r;
}

const std::set<std::string>& experiment_names() {
  static const std::set<std::string> names = [] {
    std::set<std::string> s;
    for (const auto& e : registry()) s.insert(e.name);
    return s;
  }();
  return names;
}

// ---------------------------------------------------------------------------
// verbs

int do_list() {
  std::printf("%-22s %-8s %s\n", "experiment", "dataset", "description");
  for (const auto& e : registry())
    std::printf("%-22s %-8s %s\n", e.name, e.dataset, e.blurb);
  return 0;
}

int do_validate(const fs::path& path) {
  const RunSpec spec = parse_config(path);
  spec.cfg.validate();
  const DerivedParams dp = derive_params(spec.cfg);
  std::printf("config OK: experiment=%s\n", spec.experiment.c_str());
  std::printf("  lambdabar      %.4e m\n", dp.lambdabar);
  std::printf("  depth U0       2pi x %.4e Hz\n", dp.depth / tp);
  std::printf("  omega_tw       2pi x %.2f kHz\n", dp.omega_tw / tp / 1e3);
  std::printf("  g_tilde        2pi x %.2f Hz\n", dp.g_tilde / tp);
  std::printf("  delta          2pi x %.2f Hz\n", dp.delta / tp);
  std::printf("  tau            %.3f us\n", dp.tau * 1e6);
  std::printf("  cutoffs        %d/%d   seed %llu\n", spec.ov.fock_c,
              spec.ov.fock_s, static_cast<unsigned long long>(spec.seed));
  return 0;
}

int do_run(const fs::path& path, std::optional<int> threads_cli,
           const std::string& output_cli) {
  const auto t0 = std::chrono::steady_clock::now();
  RunSpec spec = parse_config(path);
  if (!output_cli.empty()) spec.output = output_cli;
  if (spec.output.empty())
    throw ConfigError("no output path: set \"output\" in the config or pass "
                      "--output");
  if (threads_cli)
    set_max_threads(*threads_cli);
  else if (spec.threads)
    set_max_threads(*spec.threads);
  spec.cfg.validate();

  json meta;
  meta["version"] = kVersion;
  meta["experiment"] = spec.experiment;
  meta["resolved_config"] = resolved_config_json(spec);
  meta["warnings"] = json::array();

  Runner runner{spec, meta};
  const Dataset data = runner.run();

  const fs::path primary =
      fs::path(spec.output + (spec.format == "csv" ? ".csv" : ".json"));
  std::string body;
  if (spec.format == "csv") {
    body = to_csv(data);
  } else {
    json out;
    out["version"] = kVersion;
    out["experiment"] = spec.experiment;
    out["resolved_config"] = meta["resolved_config"];
    out["columns"] = data.columns;
    out["rows"] = data.rows;
    body = out.dump(2);
    body += '\n';
  }
  write_file(primary, body);

  meta["outputs"] = json::array({primary.string()});
  meta["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  const fs::path sidecar = fs::path(spec.output + ".meta.json");
  write_file(sidecar, meta.dump(2) + "\n");

  std::printf("wrote %s and %s (%zu rows, %.1f s)\n", primary.c_str(),
              sidecar.c_str(), data.rows.size(),
              meta["wall_time_s"].get<double>());
  return 0;
}

json error_report(const char* type, const std::string& what) {
  return json{{"error", {{"type", type}, {"message", what}}}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trapped-ion tweezer gate simulator"};
  app.set_version_flag("--version", std::string("magnus ") + kVersion);
  app.require_subcommand(1);

  std::string config_path, output_override;
  std::optional<int> threads;

  auto* run = app.add_subcommand("run", "execute an experiment config");
  run->add_option("config", config_path, "JSON experiment config")
      ->required();
  run->add_option("--threads", threads,
                  "worker thread cap (default: MAGNUS_THREADS or hardware)");
  run->add_option("-o,--output", output_override,
                  "output path stem, overrides the config");

  auto* lst = app.add_subcommand("list-experiments",
                                 "print the experiment registry");
  (void)lst;

  auto* val =
      app.add_subcommand("validate", "parse and check a config, run nothing");
  val->add_option("config", config_path, "JSON experiment config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand("list-experiments")) return do_list();
    if (app.got_subcommand("validate")) return do_validate(config_path);
    return do_run(config_path, threads, output_override);
  } catch (const ConfigError& e) {
    std::cerr << error_report("config", e.what()).dump() << "\n";
    return 2;
  } catch (const PhysicsError& e) {
    std::cerr << error_report("physics", e.what()).dump() << "\n";
    return 3;
  } catch (const NumericsError& e) {
    std::cerr << error_report("numerics", e.what()).dump() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << error_report("internal", e.what()).dump() << "\n";
    return 4;
  }
}
