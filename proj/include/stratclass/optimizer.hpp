// Projected online subgradient descent over an l2 ball with mixed feedback:
// exact first-order rounds and one-point bandit rounds built from sphere
// perturbations of the deployed iterate.
#ifndef STRATCLASS_OPTIMIZER_HPP
#define STRATCLASS_OPTIMIZER_HPP

#include <cstdint>
#include <optional>
#include <variant>

#include <Eigen/Dense>

#include "stratclass/errors.hpp"
#include "stratclass/rng.hpp"

namespace stratclass {

// Horizon-tuned step size and smoothing radius. theta_hat is the assumed
// upper bound on the fraction of bandit-feedback rounds:
//   delta = theta_hat^{1/4} * sqrt(d M R / (L (R + 3))) * n^{-1/4}
//   eta   = R / sqrt(n (theta_hat d^2 M^2 / delta^2 + (1 - theta_hat) L^2))
// with the theta_hat == 0 limits delta = 0, eta = R / (L sqrt(n)).
struct Schedule {
  std::int64_t n = 0;
  int d = 0;
  double R = 1.0;
  double M = 1.0;
  double L = 1.0;
  double theta_hat = 0.0;
  double delta = 0.0;
  double eta = 0.0;
};

/// Validates inputs and evaluates the formulas above. Throws
/// ScheduleInfeasible when the resulting delta is not < 1.
Schedule make_schedule(std::int64_t n, int d, double R, double M, double L,
                       double theta_hat);

/// Worst-case bound on the expected regret of the schedule against the best
/// fixed point in the R-ball when at most a theta fraction of rounds carry
/// bandit feedback:
///   eta/2 * (n theta d^2 M^2 / delta^2 + n (1-theta) L^2)
///   + R^2 / (2 eta) + 3 n L delta + n L R delta
double expected_regret_bound(const Schedule& schedule, double theta);

struct NonStrategicFeedback {
  Eigen::VectorXd subgradient;  // exact subgradient at the unperturbed iterate
};

struct StrategicFeedback {
  double loss_at_plus = 0.0;  // loss observed at the perturbed query point
};

using Feedback = std::variant<NonStrategicFeedback, StrategicFeedback>;

struct OptimizerState {
  Eigen::VectorXd beta;  // current iterate, always inside the shrunken ball
  std::int64_t t = 1;    // 1-based round index
  std::optional<Eigen::VectorXd> last_perturbation;  // sphere draw of the round
  Rng rng;
  bool awaiting_update = false;
};

/// Fresh state at the ball center with a seeded draw stream.
OptimizerState make_optimizer_state(const Schedule& schedule,
                                    std::uint64_t seed);

/// Uniform unit-sphere direction (d == 1 degenerates to +/-1).
Eigen::VectorXd sample_unit_sphere(Rng& rng, int d);

/// Query point for the round: beta + delta * S with a fresh sphere draw S
/// (stored for the matching update), or beta itself when delta == 0.
Eigen::VectorXd propose(OptimizerState& state, const Schedule& schedule);

/// Consumes the round's feedback and steps
///   beta <- Pi_{(1-delta) R ball}(beta - eta g),
/// where g is the supplied exact subgradient or the one-point estimate
/// (d / delta) * loss_at_plus * S. Throws ZeroSmoothingStrategicRound when
/// bandit feedback arrives under delta == 0.
void update(OptimizerState& state, const Schedule& schedule,
            const Feedback& feedback);

}  // namespace stratclass

#endif  // STRATCLASS_OPTIMIZER_HPP
