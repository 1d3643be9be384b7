// Norm-power manipulation costs, their convex conjugates, and the agent's
// closed-form best response.
#ifndef STRATCLASS_COSTS_HPP
#define STRATCLASS_COSTS_HPP

#include <limits>

#include <Eigen/Dense>

#include "stratclass/errors.hpp"

namespace stratclass {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// ||v||_p for p in [1, inf]. General p goes through a max-scaled pow sum for
/// overflow safety.
double lp_norm(const Eigen::VectorXd& v, double p);

/// Holder dual of p: 1/p + 1/dual = 1, with 1 <-> inf at the extremes.
double dual_exponent(double p);

// Cost d(xhat, x) = (1/r) * ||A (xhat - x)||_p ^ r together with the cached
// pieces its conjugate needs. Built by make_cost_spec; treat as immutable.
struct CostSpec {
  double p = 2.0;       // norm exponent, [1, inf]
  double q = 2.0;       // dual norm exponent
  double r = 2.0;       // cost power; r == 1 is the degenerate linear cost
  double s = 2.0;       // dual power (inf when r == 1)
  double eps = 1.0;     // declared lower bound on the smallest singular value
  Eigen::MatrixXd A;    // feature transform, d x d
  Eigen::MatrixXd B;    // (A^T)^{-1}, cached at construction
  double sigma_min = 0.0;  // smallest singular value of A
  int dim = 0;
};

/// Validates exponents, checks sigma_min(A) >= eps via an SVD, and caches
/// B = (A^T)^{-1}. Throws InvalidExponent / SingularTransform.
CostSpec make_cost_spec(double p, double r, const Eigen::MatrixXd& A,
                        double eps);

/// (1/r) * ||A (xhat - x)||_p ^ r
double cost_value(const CostSpec& spec, const Eigen::VectorXd& x,
                  const Eigen::VectorXd& xhat);

/// Conjugate of the cost's norm-power core: (1/s) * ||B beta||_q ^ s.
/// Throws DegenerateDegree when r == 1.
double conjugate_value(const CostSpec& spec, const Eigen::VectorXd& beta);

/// One element of the conjugate's subdifferential at beta. Interior q uses
/// the smooth formula; q in {1, inf} returns a fixed extreme point
/// (coordinate rule sign(0) = 0 for q == 1; all mass on the first coordinate
/// attaining the max modulus for q == inf), so repeated calls agree.
Eigen::VectorXd conjugate_subgradient(const CostSpec& spec,
                                      const Eigen::VectorXd& beta);

struct BestResponse {
  Eigen::VectorXd xhat;  // a utility-maximizing feature vector
  double inner;          // <xhat, beta>; identical across maximizer choices
};

/// Utility-maximizing response xhat = x + (conjugate subgradient), with the
/// choice-independent inner product <x,beta> + s * conjugate_value(beta).
/// For r == 1: returns x itself while ||B beta||_q <= 1 and throws
/// UnboundedResponse beyond that threshold.
BestResponse best_response(const CostSpec& spec, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& beta);

}  // namespace stratclass

#endif  // STRATCLASS_COSTS_HPP
