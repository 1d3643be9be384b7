// Shared helpers for the test binaries: random well-conditioned transforms,
// bounded random vectors, a textbook projected-OGD reference, and a
// Monte-Carlo oracle for the gradient of the ball-smoothed loss.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "stratclass/baseline.hpp"
#include "stratclass/costs.hpp"
#include "stratclass/rng.hpp"

namespace testsup {

using stratclass::Rng;

// Random square matrix with every singular value inside [lo, hi]: two
// Householder orthogonal factors around a drawn diagonal.
inline Eigen::MatrixXd random_well_conditioned(Rng& rng, int d,
                                               double lo = 0.7,
                                               double hi = 1.8) {
  Eigen::MatrixXd g1(d, d), g2(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      g1(i, j) = rng.gaussian();
      g2(i, j) = rng.gaussian();
    }
  const Eigen::MatrixXd q1 =
      Eigen::HouseholderQR<Eigen::MatrixXd>(g1).householderQ();
  const Eigen::MatrixXd q2 =
      Eigen::HouseholderQR<Eigen::MatrixXd>(g2).householderQ();
  Eigen::VectorXd sing(d);
  for (int i = 0; i < d; ++i) sing(i) = lo + rng.uniform01() * (hi - lo);
  return q1 * sing.asDiagonal() * q2.transpose();
}

// Uniform draw from the radius-`radius` ball.
inline Eigen::VectorXd random_ball_vector(Rng& rng, int d, double radius) {
  const Eigen::VectorXd dir = stratclass::unit_sphere_vector(rng, d);
  const double r =
      radius * std::pow(rng.uniform01(), 1.0 / static_cast<double>(d));
  return r * dir;
}

// Textbook projected online gradient descent over the radius-`radius` ball.
// Deliberately mirrors the library update's expression shapes so that
// trajectories can be compared bit for bit.
struct ReferenceOgd {
  Eigen::VectorXd beta;
  double eta;
  double radius;

  ReferenceOgd(int d, double eta_, double radius_)
      : beta(Eigen::VectorXd::Zero(d)), eta(eta_), radius(radius_) {}

  void step(const Eigen::VectorXd& g) {
    Eigen::VectorXd cand = beta - eta * g;
    const double n2 = cand.squaredNorm();
    if (n2 > radius * radius) cand *= radius / std::sqrt(n2);
    beta = cand;
  }
};

struct SmoothedGradientEstimate {
  Eigen::VectorXd grad;
  Eigen::VectorXd se;  // per-coordinate standard error of the mean
};

// Monte-Carlo gradient of the ball-smoothed function
//   F(beta) = E_{u ~ Uniform(ball)} f(beta + delta * u)
// via central differences sharing the same u draws across the +/- shifts,
// so the difference variance stays tiny.
inline SmoothedGradientEstimate mc_ball_smoothed_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& beta, double delta, double h, std::int64_t m,
    std::uint64_t seed) {
  const int d = static_cast<int>(beta.size());
  Rng rng(seed);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd sumsq = Eigen::VectorXd::Zero(d);
  for (std::int64_t k = 0; k < m; ++k) {
    const Eigen::VectorXd center = beta + delta * random_ball_vector(rng, d, 1.0);
    for (int j = 0; j < d; ++j) {
      Eigen::VectorXd hi = center, lo = center;
      hi(j) += h;
      lo(j) -= h;
      const double slope = (f(hi) - f(lo)) / (2.0 * h);
      sum(j) += slope;
      sumsq(j) += slope * slope;
    }
  }
  SmoothedGradientEstimate out;
  out.grad = sum / static_cast<double>(m);
  out.se.resize(d);
  for (int j = 0; j < d; ++j) {
    const double var =
        (sumsq(j) - sum(j) * sum(j) / static_cast<double>(m)) /
        (static_cast<double>(m) - 1.0);
    out.se(j) = std::sqrt(std::max(var, 0.0) / static_cast<double>(m));
  }
  return out;
}

}  // namespace testsup
