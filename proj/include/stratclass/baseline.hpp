// Offline full-information baseline (the hindsight optimum regret is
// measured against) plus the brute-force oracles used to certify the
// closed-form formulas elsewhere in the library.
#ifndef STRATCLASS_BASELINE_HPP
#define STRATCLASS_BASELINE_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "stratclass/costs.hpp"
#include "stratclass/environment.hpp"
#include "stratclass/errors.hpp"
#include "stratclass/losses.hpp"

namespace stratclass {

struct HindsightSolution {
  Eigen::VectorXd beta_star;
  double total_loss = 0.0;
  std::int64_t iterations = 0;
  // Certified upper bound on total_loss - min over the ball. From the
  // subgradient run's convexity certificates (grid resolution bound for the
  // grid solver).
  double certified_gap = 0.0;
  std::int64_t n_agents = 0;  // rounds covered, for record-length checks
};

/// Projected subgradient descent on F(beta) = sum of ground-truth round
/// losses over the R-ball, step R / (G sqrt(k)) with G the running empirical
/// subgradient-norm bound. Returns the best evaluated point; stops once the
/// certificates bracket the optimum within tol * (1 + |best value|) or the
/// iteration budget runs out. DegenerateDegree propagates if a strategic
/// agent has r == 1.
HindsightSolution hindsight_optimum(const std::vector<AgentProfile>& agents,
                                    LossKind kind, double R,
                                    std::int64_t iterations = 100000,
                                    double tol = 1e-4);

/// Exhaustive d <= 3 cross-check on the axis grid {k * resolution} cut to the
/// R-ball; ties resolve to the lexicographically smallest grid point. The
/// certified gap is L_F * resolution * sqrt(d) with L_F the summed per-round
/// Lipschitz bounds. Throws DimensionTooLarge above d == 3.
HindsightSolution grid_hindsight_optimum(
    const std::vector<AgentProfile>& agents, LossKind kind, double R,
    double resolution);

/// Independent response oracle: finite-difference gradient ascent with
/// backtracking on u(z) = <z, beta> - cost_value(x, z), started at z = x.
/// Certified against the closed-form supremum <x, beta> + conjugate_value;
/// throws NoConvergence if the budget ends more than tol short of it.
Eigen::VectorXd numeric_best_response(const CostSpec& spec,
                                      const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& beta,
                                      int steps = 500, double tol = 1e-6);

/// Central finite differences of fn at beta, coordinate step `step`.
Eigen::VectorXd finite_difference_gradient(
    const std::function<double(const Eigen::VectorXd&)>& fn,
    const Eigen::VectorXd& beta, double step = 1e-5);

/// Brute-force conjugate oracle for d == 2: nested grid refinement of
/// sup_x <beta, x> - cost_value(0, x) starting from a square of half-width
/// 10 * ||beta|| (expanded if the maximizer lands on the boundary). Uses the
/// forward cost only, never the closed-form conjugate.
double grid_conjugate_value(const CostSpec& spec, const Eigen::VectorXd& beta,
                            int points_per_axis = 161, int refinements = 14);

}  // namespace stratclass

#endif  // STRATCLASS_BASELINE_HPP
