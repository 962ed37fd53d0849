#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace magnus {

// Standard normal deviates with a fixed, portable construction: 53-bit
// uniforms from mt19937_64 fed through Box-Muller. std::normal_distribution
// is deliberately avoided because its algorithm is implementation-defined and
// would break byte-identical reruns across standard libraries.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // (x + 0.5) / 2^64-ish keeps u strictly inside (0, 1).
    const double u1 = (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Independent stream for one noise realisation. Seeding goes through
// splitmix64 so neighbouring indices do not produce correlated states.
inline GaussianStream realization_stream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  z ^= z >> 31;
  return GaussianStream(z);
}

}  // namespace magnus
