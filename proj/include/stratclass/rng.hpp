// Deterministic random source. Every draw maps mt19937_64 output through
// fixed arithmetic only (no std::*_distribution, whose algorithms are
// implementation-defined), so streams are reproducible across platforms.
#ifndef STRATCLASS_RNG_HPP
#define STRATCLASS_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace stratclass {

inline constexpr double kPi = 3.14159265358979323846;

// SplitMix64 finalizer: used as a seed scrambler and as the documented
// substream derivation rule below.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Independent stream roles. Values are arbitrary fixed tags.
enum class SeedRole : std::uint64_t {
  stream = 0x53545245414DULL,     // agent stream realization
  optimizer = 0x4F5054494D49ULL,  // learner's perturbation draws
};

// Documented splitting rule: base -> role -> cell -> replicate, one
// splitmix64 application per stage. Sweep cells index (theta, n) pairs in
// theta-major order; a standalone run is cell 0, replicate 0.
inline std::uint64_t derive_seed(std::uint64_t base, SeedRole role,
                                 std::uint64_t cell = 0,
                                 std::uint64_t replicate = 0) {
  std::uint64_t z = splitmix64(base ^ static_cast<std::uint64_t>(role));
  z = splitmix64(z ^ cell);
  return splitmix64(z ^ replicate);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  // Uniform on (0,1]; zero is excluded so log() downstream is safe.
  double uniform01() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller, cosine branch only: exactly two engine
  // draws per call, which keeps per-round consumption deterministic.
  double gaussian() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

inline Eigen::VectorXd gaussian_vector(Rng& rng, int d) {
  Eigen::VectorXd g(d);
  for (int i = 0; i < d; ++i) g(i) = rng.gaussian();
  return g;
}

// Uniform direction on the unit sphere; the measure-zero zero draw is
// resampled. In d == 1 this is +/-1 with equal probability.
inline Eigen::VectorXd unit_sphere_vector(Rng& rng, int d) {
  for (;;) {
    Eigen::VectorXd g = gaussian_vector(rng, d);
    const double nrm = g.norm();
    if (nrm > 0.0) return g / nrm;
  }
}

}  // namespace stratclass

#endif  // STRATCLASS_RNG_HPP
