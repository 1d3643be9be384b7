#include "stratclass/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace stratclass {

namespace {

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

void check_label(int y) {
  if (y != 1 && y != -1)
    throw std::invalid_argument("label must be +1 or -1");
}

}  // namespace

double link_value(LossKind kind, double z) {
  switch (kind) {
    case LossKind::logistic:
      // Branch keeps the exp argument nonpositive on both sides.
      return z >= 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
    case LossKind::hinge:
      return 1.0 - z > 0.0 ? 1.0 - z : 0.0;
  }
  throw std::invalid_argument("unknown loss kind");
}

double observed_loss(LossKind kind, const Eigen::VectorXd& xhat, int y,
                     const Eigen::VectorXd& beta) {
  check_label(y);
  if (xhat.size() != beta.size())
    throw std::invalid_argument("xhat and beta dimension mismatch");
  return link_value(kind, static_cast<double>(y) * xhat.dot(beta));
}

double strategic_loss_closed_form(const CostSpec& spec, LossKind kind,
                                  const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& beta) {
  const double z = -(x.dot(beta) + spec.s * conjugate_value(spec, beta));
  return link_value(kind, z);
}

Eigen::VectorXd nonstrategic_subgradient(LossKind kind,
                                         const Eigen::VectorXd& x,
                                         const Eigen::VectorXd& beta) {
  if (x.size() != beta.size())
    throw std::invalid_argument("x and beta dimension mismatch");
  const double z = x.dot(beta);
  switch (kind) {
    case LossKind::logistic:
      return (-sigmoid(-z)) * x;
    case LossKind::hinge:
      // Kink at z == 1 resolves to the zero element.
      if (1.0 - z > 0.0) return (-x).eval();
      return Eigen::VectorXd::Zero(x.size());
  }
  throw std::invalid_argument("unknown loss kind");
}

Eigen::VectorXd strategic_exact_subgradient(const CostSpec& spec,
                                            LossKind kind,
                                            const Eigen::VectorXd& x,
                                            const Eigen::VectorXd& beta) {
  const Eigen::VectorXd v = conjugate_subgradient(spec, beta);
  const double z = -(x.dot(beta) + spec.s * conjugate_value(spec, beta));
  double neg_hprime = 0.0;  // -h'(z)
  switch (kind) {
    case LossKind::logistic:
      neg_hprime = sigmoid(-z);
      break;
    case LossKind::hinge:
      neg_hprime = z < 1.0 ? 1.0 : 0.0;  // kink at z == 1 resolves to 0
      break;
  }
  return neg_hprime * (x + spec.s * v);
}

LossConstants constants(const CostSpec& spec, [[maybe_unused]] LossKind kind,
                        double R1, double R2) {
  // Both supported links satisfy |h(t)| <= 1 + |t| and |h'| <= 1, so the
  // bounds do not depend on the kind.
  if (spec.r == 1.0)
    throw DegenerateDegree("constants undefined for the degenerate r == 1");
  if (!std::isfinite(R1) || R1 <= 0.0)
    throw std::invalid_argument("R1 must be positive");
  if (!std::isfinite(R2) || R2 < 1.0)
    throw std::invalid_argument("R2 must be >= 1");

  const double exponent = std::max(0.0, 1.0 / spec.q - 0.5);
  LossConstants out;
  out.R1 = R1;
  out.R2 = R2;
  out.C = std::pow(static_cast<double>(spec.dim), exponent) / spec.eps;
  const double Cs = std::pow(out.C, spec.s);
  out.M = 1.0 + R1 * R2 + Cs * std::pow(R2, spec.s);
  out.L = R1 + spec.s * Cs * std::pow(R2, spec.s - 1.0);
  return out;
}

}  // namespace stratclass
