// Exception taxonomy shared by all modules.
#ifndef STRATCLASS_ERRORS_HPP
#define STRATCLASS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace stratclass {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Transform matrix is (numerically) singular, or closer to singular than the
// declared margin eps allows.
class SingularTransform : public Error {
 public:
  using Error::Error;
};

// Norm exponent p < 1 or cost power r < 1 (or non-finite where finiteness is
// required).
class InvalidExponent : public Error {
 public:
  using Error::Error;
};

// Conjugate-side quantities requested for the degenerate cost power r == 1,
// where the conjugate is an indicator function and has no finite power form.
class DegenerateDegree : public Error {
 public:
  using Error::Error;
};

// r == 1 cost with dual norm of the offered weights exceeding 1: the agent's
// utility is unbounded above and no finite response exists.
class UnboundedResponse : public Error {
 public:
  using Error::Error;
};

// Smoothing radius delta >= 1: the shrunken feasible set would be empty or
// the perturbed query could leave the feasible ball.
class ScheduleInfeasible : public Error {
 public:
  using Error::Error;
};

// Bandit-style feedback arrived in a round where the schedule has delta == 0
// and therefore no perturbation direction to build an estimate from.
class ZeroSmoothingStrategicRound : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent experiment configuration / stream data.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Exhaustive grid search requested in a dimension it cannot afford.
class DimensionTooLarge : public Error {
 public:
  using Error::Error;
};

// Iterative oracle exhausted its step budget before reaching its certificate.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

// Record and baseline cover different numbers of rounds.
class LengthMismatch : public Error {
 public:
  using Error::Error;
};

// Learner-side code attempted to read hidden environment state.
class BarrierViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace stratclass

#endif  // STRATCLASS_ERRORS_HPP
