#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "magnus/constants.hpp"
#include "magnus/errors.hpp"
#include "magnus/gate.hpp"
#include "magnus/parallel.hpp"

namespace magnus {

std::pair<double, double> echo_times(const GateSchedule& sched,
                                     const NoiseSettings& noise) {
  const double t_total = sched.tau + noise.timing_shift;
  const double t_split =
      noise.split_shifted_midpoint ? 0.5 * t_total : 0.5 * sched.tau;
  return {t_total, t_split};
}

EchoChannel spin_echo_channel(const SectorPropagator& prop,
                              const GateSchedule& sched, double t_total,
                              double t_split, int n_c, int n_s,
                              double scale_first, double scale_second) {
  const GateScene& scene = prop.scene();
  if (n_c < 0 || n_c > scene.fock_c_cutoff || n_s < 0 ||
      n_s > scene.fock_s_cutoff)
    throw ConfigError("initial Fock labels exceed the scene cutoffs");

  const int d = scene.motional_dim();
  const int idx = n_c * (scene.fock_s_cutoff + 1) + n_s;
  EchoChannel ch;
  ch.n_c = n_c;
  ch.n_s = n_s;
  parallel_for(kSectors, [&](int sector) {
    Matrix col = Matrix::Zero(d, 1);
    col(idx, 0) = 1.0;
    prop.echo(sector, sched, col, t_total, t_split, scale_first, scale_second);
    ch.final_motional[sector] = col.col(0);
  });
  for (int a = 0; a < kSectors; ++a)
    for (int b = 0; b < kSectors; ++b)
      ch.gram(a, b) = ch.final_motional[a].dot(ch.final_motional[b]);
  return ch;
}

EchoChannel spin_echo_channel(const SectorPropagator& prop, int n_c, int n_s,
                              double scale_first, double scale_second) {
  const GateScene& scene = prop.scene();
  const auto [t_total, t_split] = echo_times(scene.schedule, scene.noise);
  return spin_echo_channel(prop, scene.schedule, t_total, t_split, n_c, n_s,
                           scale_first, scale_second);
}

EchoChannel spin_echo_channel(const GateScene& scene, int n_c, int n_s) {
  return spin_echo_channel(SectorPropagator(scene), n_c, n_s);
}

Matrix ideal_zz_gate() {
  Matrix u = Matrix::Zero(4, 4);
  const ComplexScalar even = std::polar(1.0, -constants::pi / 4);
  const ComplexScalar odd = std::polar(1.0, constants::pi / 4);
  u(0, 0) = even;
  u(1, 1) = odd;
  u(2, 2) = odd;
  u(3, 3) = even;
  return u;
}

namespace {

// Average over the 16 two-qubit Pauli strings of how the simulated channel
// mis-tracks conjugation by u. The channel keeps spin populations and damps
// coherences by motional overlaps: E(sigma)_{kl} = sigma_{kl} conj(gram_{kl}).
double pauli_average(const Eigen::Matrix4cd& gram, const Matrix& u) {
  const Eigen::Matrix4cd damp = gram.conjugate();
  double acc = 0.0;
  for (const Matrix& s : two_qubit_paulis()) {
    const Matrix target = u * s.adjoint() * u.adjoint();
    const Eigen::Matrix4cd mapped = Eigen::Matrix4cd(s).cwiseProduct(damp);
    acc += (target * mapped).trace().real();
  }
  const double dim = 4.0;
  return (acc + dim * dim) / (dim * dim * (dim + 1.0));
}

void check_fidelity_inputs(const Eigen::Matrix4cd& gram, const Matrix& u) {
  if (u.rows() != 4 || u.cols() != 4)
    throw ConfigError("ideal gate must act on two qubits");
  if ((u.adjoint() * u - Matrix::Identity(4, 4)).norm() > 1e-8)
    throw ConfigError("ideal gate must be unitary");
  if ((gram - gram.adjoint()).norm() > 1e-8)
    throw NumericsError("overlap matrix lost hermiticity");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(gram);
  if (es.eigenvalues().minCoeff() < -1e-8)
    throw NumericsError("overlap matrix is not positive semidefinite");
}

// Residual single-qubit Z phases commute with the echoed gate; grid plus
// coordinate refinement over the two phase angles.
double optimized_over_local_z(const Eigen::Matrix4cd& gram, const Matrix& u) {
  const auto with_phases = [&](double a, double b) {
    Eigen::Vector4cd l, lc;
    for (int k = 0; k < 4; ++k) {
      const auto signs = sector_signs(k);
      l(k) = std::polar(1.0, a * signs[0] + b * signs[1]);
      lc(k) = std::conj(l(k));
    }
    const Eigen::Matrix4cd g2 = lc.asDiagonal() * gram * l.asDiagonal();
    return pauli_average(g2, u);
  };

  double best_a = 0, best_b = 0, best = with_phases(0, 0);
  constexpr int kGrid = 24;
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      const double a = -constants::pi + constants::two_pi * i / kGrid;
      const double b = -constants::pi + constants::two_pi * j / kGrid;
      if (const double f = with_phases(a, b); f > best) {
        best = f;
        best_a = a;
        best_b = b;
      }
    }
  }
  const double half_cell = constants::pi / kGrid;
  for (int round = 0; round < 3; ++round) {
    auto ra = maximize_scalar(
        [&](double a) { return with_phases(a, best_b); }, best_a - half_cell,
        best_a + half_cell, 1e-6);
    best_a = ra.x;
    auto rb = maximize_scalar(
        [&](double b) { return with_phases(best_a, b); }, best_b - half_cell,
        best_b + half_cell, 1e-6);
    best_b = rb.x;
  }
  return std::max(best, with_phases(best_a, best_b));
}

}  // namespace

double process_fidelity(const Eigen::Matrix4cd& gram, const Matrix& u_ideal,
                        const FidelityOptions& opt) {
  check_fidelity_inputs(gram, u_ideal);
  if (!opt.optimize_local_phases) return pauli_average(gram, u_ideal);
  return optimized_over_local_z(gram, u_ideal);
}

double process_fidelity(const std::vector<EchoChannel>& channels,
                        const std::vector<double>& weights,
                        const Matrix& u_ideal, const FidelityOptions& opt) {
  if (channels.size() != weights.size())
    throw ConfigError("one weight per channel required");
  if (channels.empty()) throw ConfigError("no channels to average");
  double mass = 0, acc = 0;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (weights[i] < 0) throw ConfigError("channel weights must be >= 0");
    acc += weights[i] * process_fidelity(channels[i].gram, u_ideal, opt);
    mass += weights[i];
  }
  if (mass <= 0) throw ConfigError("channel weights sum to zero");
  return acc / mass;
}

double ground_fidelity(const GateScene& scene, const FidelityOptions& opt) {
  const SectorPropagator prop(scene);
  const EchoChannel ch = spin_echo_channel(prop, 0, 0);
  return process_fidelity(ch.gram, ideal_zz_gate(), opt);
}

std::vector<double> thermal_weights(double nbar, int cutoff) {
  if (nbar < 0) throw ConfigError("thermal occupation must be >= 0");
  if (cutoff < 0) throw ConfigError("cutoff must be >= 0");
  std::vector<double> w(cutoff + 1);
  // Geometric distribution nbar^n / (nbar+1)^(n+1); ratio form avoids pow(0,0).
  double term = 1.0 / (nbar + 1.0);
  const double ratio = nbar / (nbar + 1.0);
  for (int n = 0; n <= cutoff; ++n) {
    w[n] = term;
    term *= ratio;
  }
  return w;
}

ThermalResult thermal_fidelity(const GateScene& scene, double nbar_c,
                               double nbar_s, const ThermalOptions& opt) {
  if (!(opt.mass_floor > 0) || opt.mass_floor > 1.0)
    throw ConfigError("mass floor must lie in (0, 1]");
  const auto wc = thermal_weights(nbar_c, scene.fock_c_cutoff);
  const auto ws = thermal_weights(nbar_s, scene.fock_s_cutoff);

  struct Item {
    int n_c, n_s;
    double w;
  };
  std::vector<Item> items;
  double inside = 0.0;
  for (int nc = 0; nc < static_cast<int>(wc.size()); ++nc)
    for (int ns = 0; ns < static_cast<int>(ws.size()); ++ns) {
      items.push_back({nc, ns, wc[nc] * ws[ns]});
      inside += items.back().w;
    }
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    if (a.w != b.w) return a.w > b.w;
    return std::tie(a.n_c, a.n_s) < std::tie(b.n_c, b.n_s);
  });

  ThermalResult res;
  res.truncated_mass = 1.0 - inside;
  if (res.truncated_mass > 0.01) {
    std::ostringstream msg;
    msg << "Fock cutoffs drop " << 100.0 * res.truncated_mass
        << "% of the thermal distribution; raise the cutoffs";
    res.warnings.push_back(msg.str());
  }

  std::size_t count = 0;
  double mass = 0.0;
  while (count < items.size() && mass < opt.mass_floor)
    mass += items[count++].w;
  res.sectors_used = static_cast<int>(count);
  res.included_mass = mass;

  const SectorPropagator prop(scene);
  const auto [t_total, t_split] = echo_times(scene.schedule, scene.noise);
  const int d = scene.motional_dim();
  const int dim_s = scene.fock_s_cutoff + 1;

  std::array<Matrix, kSectors> out;
  parallel_for(kSectors, [&](int sector) {
    Matrix cols = Matrix::Zero(d, static_cast<Eigen::Index>(count));
    for (std::size_t j = 0; j < count; ++j)
      cols(items[j].n_c * dim_s + items[j].n_s, static_cast<Eigen::Index>(j)) =
          1.0;
    prop.echo(sector, scene.schedule, cols, t_total, t_split);
    out[sector] = std::move(cols);
  });

  const Matrix u_ideal = ideal_zz_gate();
  double acc = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    Eigen::Matrix4cd gram;
    for (int a = 0; a < kSectors; ++a)
      for (int b = 0; b < kSectors; ++b)
        gram(a, b) = out[a].col(j).dot(out[b].col(j));
    acc += items[j].w * process_fidelity(gram, u_ideal, opt.fidelity);
  }
  res.fidelity = acc / mass;
  return res;
}

}  // namespace magnus
