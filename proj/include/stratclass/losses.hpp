// Classification losses on responded features, their subgradients, and the
// loss/Lipschitz constants used to tune the optimizer schedule.
#ifndef STRATCLASS_LOSSES_HPP
#define STRATCLASS_LOSSES_HPP

#include <Eigen/Dense>

#include "stratclass/costs.hpp"
#include "stratclass/errors.hpp"

namespace stratclass {

enum class LossKind { logistic, hinge };

/// h(z): logistic log(1 + e^{-z}) via overflow-safe log1p branches, or hinge
/// (1 - z)_+.
double link_value(LossKind kind, double z);

/// Loss the learner observes after the agent responds: h(y * <xhat, beta>).
double observed_loss(LossKind kind, const Eigen::VectorXd& xhat, int y,
                     const Eigen::VectorXd& beta);

/// Closed form of the negative-label strategic round loss as a function of
/// the deployed weights: h(-(<x, beta> + s * conjugate_value(beta))).
double strategic_loss_closed_form(const CostSpec& spec, LossKind kind,
                                  const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& beta);

/// Subgradient in beta of h(<x, beta>) for a truthful positive round.
/// Logistic: -x * sigma(-<x,beta>); hinge: -x while the margin is violated,
/// zero otherwise (kink resolved to zero).
Eigen::VectorXd nonstrategic_subgradient(LossKind kind,
                                         const Eigen::VectorXd& x,
                                         const Eigen::VectorXd& beta);

/// Full-information subgradient of the strategic closed form via the chain
/// rule: -h'(z) * (x + s * conjugate_subgradient(beta)).
Eigen::VectorXd strategic_exact_subgradient(const CostSpec& spec,
                                            LossKind kind,
                                            const Eigen::VectorXd& x,
                                            const Eigen::VectorXd& beta);

// Uniform bounds over ||x|| <= R1, ||beta|| <= R2 for either loss kind
// (both links satisfy |h(t)| <= 1 + |t| and |h'| <= 1):
//   C = eps^{-1} * d^{(1/q - 1/2)_+}   response-magnitude factor
//   M = 1 + R1 R2 + C^s R2^s           loss magnitude bound
//   L = R1 + s C^s R2^{s-1}            Lipschitz bound in beta
struct LossConstants {
  double M = 0.0;
  double L = 0.0;
  double C = 0.0;
  double R1 = 0.0;
  double R2 = 0.0;
};

/// Computes the bounds above. Requires r > 1, R1 > 0, R2 >= 1.
LossConstants constants(const CostSpec& spec, LossKind kind, double R1,
                        double R2);

}  // namespace stratclass

#endif  // STRATCLASS_LOSSES_HPP
