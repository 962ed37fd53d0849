#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "magnus/hilbert.hpp"

namespace magnus {

enum class BeamKind { gaussian, laguerre_gaussian_l1 };

struct BeamProfile {
  BeamKind kind = BeamKind::gaussian;
  double angular_waist = 0.6;  // rad, 1/e amplitude half-angle of a(theta)
  double wavelength;           // m
};

struct FocalGridSpec {
  double extent;        // m, half-width of the square focal-plane window
  int points = 81;      // per axis; odd, so the grid contains the focal line
  int theta_nodes = 128;
  int phi_nodes = 256;
  bool verify_quadrature = true;  // re-run at doubled nodes and compare
};

// Focal-plane field of a tightly focused x-polarised beam, rotated so the
// propagation axis is -y in the lab frame: the focal plane spans lab x and z.
struct FieldGrid {
  std::vector<double> x, z;  // lab axes (m); row index = x, column = z
  std::array<Eigen::MatrixXcd, 3> e_lab;  // E_x, E_y, E_z
  Eigen::MatrixXcd sigma_plus, sigma_minus, pi_comp;
  double quadrature_residual = 0.0;  // relative change under node doubling

  Eigen::MatrixXd intensity() const;  // |E|^2, arbitrary units (peak == 1)
};

// Angular-spectrum superposition of plane waves: each direction (theta, phi)
// carries the co-rotated x polarisation vector and amplitude a(theta, phi);
// Gauss-Legendre in theta, uniform trapezoid in phi.
FieldGrid focal_field(const BeamProfile& beam, const FocalGridSpec& spec);

// Intensity-weighted centroid along x of one circular component on the focal
// line z = 0. `sigma_sign` is +1 or -1. Errors on multimodal profiles.
double component_offset(const FieldGrid& grid, int sigma_sign);

// max |pi|^2 / max(|sigma+|^2, |sigma-|^2) over the whole grid.
double pi_suppression(const FieldGrid& grid);

// Gauss-Legendre nodes and weights on [a, b]; exposed for quadrature tests.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n,
                                                                   double a,
                                                                   double b);

}  // namespace magnus
