#include "stratclass/optimizer.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "stratclass/costs.hpp"

namespace stratclass {

Schedule make_schedule(std::int64_t n, int d, double R, double M, double L,
                       double theta_hat) {
  if (n < 1) throw std::invalid_argument("horizon n must be >= 1");
  if (d < 1) throw std::invalid_argument("dimension d must be >= 1");
  if (!std::isfinite(R) || R < 1.0)
    throw std::invalid_argument("ball radius R must be >= 1");
  if (!std::isfinite(M) || M <= 0.0)
    throw std::invalid_argument("loss bound M must be positive");
  if (!std::isfinite(L) || L <= 0.0)
    throw std::invalid_argument("Lipschitz bound L must be positive");
  if (!(theta_hat >= 0.0 && theta_hat <= 1.0))
    throw std::invalid_argument("theta_hat must lie in [0, 1]");

  Schedule sch;
  sch.n = n;
  sch.d = d;
  sch.R = R;
  sch.M = M;
  sch.L = L;
  sch.theta_hat = theta_hat;

  const double nd = static_cast<double>(n);
  if (theta_hat == 0.0) {
    sch.delta = 0.0;
    sch.eta = R / (L * std::sqrt(nd));
    return sch;
  }

  sch.delta = std::pow(theta_hat, 0.25) *
              std::sqrt(d * M * R / (L * (R + 3.0))) * std::pow(nd, -0.25);
  if (!(sch.delta < 1.0)) {
    std::ostringstream msg;
    msg << "smoothing radius " << sch.delta
        << " >= 1; horizon too short for these constants";
    throw ScheduleInfeasible(msg.str());
  }
  const double dd = static_cast<double>(d);
  sch.eta = R / std::sqrt(nd * (theta_hat * dd * dd * M * M /
                                    (sch.delta * sch.delta) +
                                (1.0 - theta_hat) * L * L));
  return sch;
}

double expected_regret_bound(const Schedule& sch, double theta) {
  if (!(theta >= 0.0 && theta <= 1.0))
    throw std::invalid_argument("theta must lie in [0, 1]");
  const double nd = static_cast<double>(sch.n);
  const double dd = static_cast<double>(sch.d);
  double bandit_term = 0.0;
  if (theta > 0.0) {
    if (sch.delta <= 0.0) return kInf;  // no estimate exists without smoothing
    bandit_term =
        nd * theta * dd * dd * sch.M * sch.M / (sch.delta * sch.delta);
  }
  const double gradient_term = nd * (1.0 - theta) * sch.L * sch.L;
  return sch.eta / 2.0 * (bandit_term + gradient_term) +
         sch.R * sch.R / (2.0 * sch.eta) + 3.0 * nd * sch.L * sch.delta +
         nd * sch.L * sch.R * sch.delta;
}

OptimizerState make_optimizer_state(const Schedule& schedule,
                                    std::uint64_t seed) {
  OptimizerState st{Eigen::VectorXd::Zero(schedule.d), 1, std::nullopt,
                    Rng(seed), false};
  return st;
}

Eigen::VectorXd sample_unit_sphere(Rng& rng, int d) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  return unit_sphere_vector(rng, d);
}

Eigen::VectorXd propose(OptimizerState& state, const Schedule& schedule) {
  if (state.awaiting_update)
    throw std::logic_error("propose called twice without an update");
  if (state.beta.size() != schedule.d)
    throw std::invalid_argument("state/schedule dimension mismatch");
  state.awaiting_update = true;
  if (schedule.delta > 0.0) {
    Eigen::VectorXd S = sample_unit_sphere(state.rng, schedule.d);
    state.last_perturbation = S;
    return state.beta + schedule.delta * S;
  }
  state.last_perturbation.reset();
  return state.beta;
}

void update(OptimizerState& state, const Schedule& schedule,
            const Feedback& feedback) {
  if (!state.awaiting_update)
    throw std::logic_error("update called without a matching propose");

  Eigen::VectorXd g;
  if (const auto* ns = std::get_if<NonStrategicFeedback>(&feedback)) {
    if (ns->subgradient.size() != schedule.d)
      throw std::invalid_argument("feedback subgradient dimension mismatch");
    g = ns->subgradient;
  } else {
    const auto& s = std::get<StrategicFeedback>(feedback);
    if (schedule.delta == 0.0)
      throw ZeroSmoothingStrategicRound(
          "bandit feedback with delta == 0: no perturbation to attribute the "
          "observed loss to");
    // One-point estimate (d / delta) * loss * S from this round's draw.
    g = (static_cast<double>(schedule.d) / schedule.delta) * s.loss_at_plus *
        (*state.last_perturbation);
  }

  Eigen::VectorXd cand = state.beta - schedule.eta * g;
  const double radius = (1.0 - schedule.delta) * schedule.R;
  const double n2 = cand.squaredNorm();
  if (n2 > radius * radius) cand *= radius / std::sqrt(n2);
  state.beta = cand;
  state.t += 1;
  state.last_perturbation.reset();
  state.awaiting_update = false;
}

}  // namespace stratclass
