#include "magnus/focal.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include "magnus/constants.hpp"
#include "magnus/errors.hpp"
#include "magnus/parallel.hpp"

namespace magnus {

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n,
                                                                   double a,
                                                                   double b) {
  if (n < 1) throw ConfigError("quadrature needs at least one node");
  std::vector<double> x(n), w(n);
  // Newton iteration per root of P_n, Chebyshev-angle initial guesses.
  for (int i = 0; i < n; ++i) {
    double t = std::cos(constants::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double step = p1 / dp;
      t -= step;
      if (std::abs(step) < 1e-15) break;
    }
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    x[i] = mid + half * x[i];
    w[i] *= half;
  }
  return {x, w};
}

namespace {

struct NodeField {
  // One theta row summed over phi; kept per row so the final reduction order
  // is fixed no matter how many threads ran.
  std::array<Eigen::MatrixXcd, 3> e;
};

std::array<Eigen::MatrixXcd, 3> beam_frame_field(const BeamProfile& beam,
                                                 const std::vector<double>& xs,
                                                 int theta_nodes,
                                                 int phi_nodes) {
  const int np = static_cast<int>(xs.size());
  const double k = constants::two_pi / beam.wavelength;
  const double w_th = beam.angular_waist;
  const auto [th, thw] = gauss_legendre(theta_nodes, 0.0, constants::pi);

  std::vector<NodeField> rows(theta_nodes);
  parallel_for(theta_nodes, [&](int it) {
    auto& acc = rows[it].e;
    for (auto& m : acc) m = Eigen::MatrixXcd::Zero(np, np);
    const double theta = th[it];
    const double st = std::sin(theta), ct = std::cos(theta);
    const double radial = std::exp(-theta * theta / (w_th * w_th)) *
                          (beam.kind == BeamKind::laguerre_gaussian_l1
                               ? theta / w_th
                               : 1.0);
    if (radial < 1e-14) return;  // tail of the aperture function

    Eigen::VectorXcd ex(np), ey(np);
    for (int ip = 0; ip < phi_nodes; ++ip) {
      const double phi = constants::two_pi * ip / phi_nodes;
      const double sp = std::sin(phi), cp = std::cos(phi);
      // x unit vector co-rotated with k: R_z(phi) R_y(theta) R_z(-phi) x.
      const double ux = cp * cp * ct + sp * sp;
      const double uy = sp * cp * (ct - 1.0);
      const double uz = -cp * st;
      ComplexScalar amp(radial, 0.0);
      if (beam.kind == BeamKind::laguerre_gaussian_l1)
        amp *= ComplexScalar(cp, sp);  // e^{i phi} azimuthal winding
      amp *= thw[it] * st * (constants::two_pi / phi_nodes);

      const double kx = k * st * cp, ky = k * st * sp;
      for (int i = 0; i < np; ++i) {
        ex(i) = std::polar(1.0, kx * xs[i]);
        ey(i) = std::polar(1.0, ky * xs[i]);
      }
      acc[0].noalias() += (amp * ux) * ex * ey.transpose();
      acc[1].noalias() += (amp * uy) * ex * ey.transpose();
      acc[2].noalias() += (amp * uz) * ex * ey.transpose();
    }
  });

  std::array<Eigen::MatrixXcd, 3> field;
  for (auto& m : field) m = Eigen::MatrixXcd::Zero(np, np);
  for (int it = 0; it < theta_nodes; ++it)
    if (rows[it].e[0].size() > 0)
      for (int c = 0; c < 3; ++c) field[c] += rows[it].e[c];
  return field;
}

}  // namespace

Eigen::MatrixXd FieldGrid::intensity() const {
  return (sigma_plus.cwiseAbs2() + sigma_minus.cwiseAbs2() +
          pi_comp.cwiseAbs2());
}

FieldGrid focal_field(const BeamProfile& beam, const FocalGridSpec& spec) {
  if (!(beam.angular_waist > 0) || beam.angular_waist >= constants::pi / 2)
    throw ConfigError("angular waist must lie in (0, pi/2)");
  if (!(beam.wavelength > 0)) throw ConfigError("wavelength must be positive");
  if (spec.points < 3 || spec.points % 2 == 0)
    throw ConfigError("grid needs an odd point count >= 3 so z = 0 is sampled");
  if (spec.theta_nodes < 8 || spec.phi_nodes < 8)
    throw ConfigError("too few quadrature nodes");
  const double k = constants::two_pi / beam.wavelength;
  // Focal spot radius of the apodized angular spectrum; the window has to
  // cover a couple of spot sizes for centroids to mean anything.
  const double spot = 2.0 / (k * beam.angular_waist);
  if (spec.extent < 2.0 * spot)
    throw ConfigError("grid extent smaller than twice the focal spot");

  FieldGrid grid;
  grid.x.resize(spec.points);
  grid.z.resize(spec.points);
  for (int i = 0; i < spec.points; ++i) {
    const double u = -spec.extent +
                     2.0 * spec.extent * i / (spec.points - 1);
    grid.x[i] = u;
    grid.z[i] = u;
  }

  auto beam_field =
      beam_frame_field(beam, grid.x, spec.theta_nodes, spec.phi_nodes);

  if (spec.verify_quadrature) {
    const auto fine = beam_frame_field(beam, grid.x, 2 * spec.theta_nodes,
                                       2 * spec.phi_nodes);
    double num = 0.0, den = 0.0;
    for (int c = 0; c < 3; ++c) {
      num = std::max(num, (fine[c] - beam_field[c]).cwiseAbs().maxCoeff());
      den = std::max(den, fine[c].cwiseAbs().maxCoeff());
    }
    grid.quadrature_residual = den > 0 ? num / den : 0.0;
    if (grid.quadrature_residual > 1e-4) {
      std::ostringstream msg;
      msg << "focal quadrature not converged: doubling "
          << spec.theta_nodes << "x" << spec.phi_nodes << " nodes moves the "
          << "field by " << grid.quadrature_residual
          << " relative (want <= 1e-4); raise theta/phi node counts";
      throw NumericsError(msg.str());
    }
  }

  // Rotate beam frame (propagation +z_b) into the lab (propagation -y):
  // x_b -> x, y_b -> z, z_b -> -y.
  grid.e_lab[0] = beam_field[0];
  grid.e_lab[1] = -beam_field[2];
  grid.e_lab[2] = beam_field[1];

  // Peak-normalise for stable output magnitudes.
  double peak = 0.0;
  for (const auto& m : grid.e_lab)
    peak = std::max(peak, m.cwiseAbs().maxCoeff());
  if (peak > 0)
    for (auto& m : grid.e_lab) m /= peak;

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const ComplexScalar i_unit(0.0, 1.0);
  // Projections onto (x +- i y)/sqrt(2); pi is the z component.
  grid.sigma_plus = inv_sqrt2 * (grid.e_lab[0] - i_unit * grid.e_lab[1]);
  grid.sigma_minus = inv_sqrt2 * (grid.e_lab[0] + i_unit * grid.e_lab[1]);
  grid.pi_comp = grid.e_lab[2];
  return grid;
}

double component_offset(const FieldGrid& grid, int sigma_sign) {
  if (sigma_sign != 1 && sigma_sign != -1)
    throw ConfigError("sigma_sign must be +1 or -1");
  const Eigen::MatrixXcd& comp =
      sigma_sign == 1 ? grid.sigma_plus : grid.sigma_minus;
  const int np = static_cast<int>(grid.x.size());
  const int mid = np / 2;  // z = 0 column

  Eigen::VectorXd line(np);
  for (int i = 0; i < np; ++i) line(i) = std::norm(comp(i, mid));
  const double top = line.maxCoeff();
  if (!(top > 0)) throw NumericsError("component vanishes on the focal line");

  // Unimodality guard; ignore ripples far below the peak.
  int peaks = 0;
  for (int i = 1; i + 1 < np; ++i)
    if (line(i) > line(i - 1) && line(i) >= line(i + 1) &&
        line(i) > 1e-3 * top)
      ++peaks;
  if (peaks > 1)
    throw NumericsError(
        "component intensity is multimodal on the focal line; a centroid is "
        "meaningless, fit the peaks instead");

  double num = 0.0, den = 0.0;
  for (int i = 0; i < np; ++i) {
    num += line(i) * grid.x[i];
    den += line(i);
  }
  return num / den;
}

double pi_suppression(const FieldGrid& grid) {
  const double pi_max = grid.pi_comp.cwiseAbs2().maxCoeff();
  const double sigma_max = std::max(grid.sigma_plus.cwiseAbs2().maxCoeff(),
                                    grid.sigma_minus.cwiseAbs2().maxCoeff());
  if (!(sigma_max > 0))
    throw NumericsError("circular components vanish on the grid");
  return pi_max / sigma_max;
}

}  // namespace magnus
