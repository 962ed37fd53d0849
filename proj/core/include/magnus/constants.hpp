#pragma once

// CODATA 2018 values, SI units.
namespace magnus::constants {

inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double h_planck = 6.62607015e-34;   // J s
inline constexpr double c_light = 299792458.0;       // m/s
inline constexpr double e_charge = 1.602176634e-19;  // C
inline constexpr double eps0 = 8.8541878128e-12;     // F/m
inline constexpr double amu = 1.66053906660e-27;     // kg

inline constexpr double yb174_mass_u = 173.9388664;  // atomic mass of 174Yb

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

}  // namespace magnus::constants
