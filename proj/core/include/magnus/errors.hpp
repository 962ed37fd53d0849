#pragma once

#include <stdexcept>
#include <string>

namespace magnus {

// Thrown on malformed user input (bad config keys, shapes, ranges).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when parameters describe a regime the model does not cover
// (e.g. waist too small for the displaced-well picture, detuning not large).
struct PhysicsError : std::runtime_error {
  explicit PhysicsError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown on numerical failure (non-convergence, loss of unitarity, ...).
struct NumericsError : std::runtime_error {
  explicit NumericsError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace magnus
