#include "stratclass/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace stratclass {

namespace {

// F(beta) = sum of full-information round losses.
double objective(const std::vector<AgentProfile>& agents, LossKind kind,
                 const Eigen::VectorXd& beta) {
  double acc = 0.0;
  for (const AgentProfile& a : agents) acc += ground_truth_loss(a, kind, beta);
  return acc;
}

Eigen::VectorXd objective_subgradient(const std::vector<AgentProfile>& agents,
                                      LossKind kind,
                                      const Eigen::VectorXd& beta) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(beta.size());
  for (const AgentProfile& a : agents) {
    if (a.label() == 1)
      g += nonstrategic_subgradient(kind, a.true_features(), beta);
    else
      g += strategic_exact_subgradient(a.cost(), kind, a.true_features(),
                                       beta);
  }
  return g;
}

// F(beta*) >= F(c) - gap(c) for any subgradient g of F at c over the R-ball:
// the linearization drops by at most <g, c> + R ||g||.
double linearization_gap(const Eigen::VectorXd& c, const Eigen::VectorXd& g,
                         double R) {
  return g.dot(c) + R * g.norm();
}

Eigen::VectorXd project_ball(Eigen::VectorXd v, double R) {
  const double n2 = v.squaredNorm();
  if (n2 > R * R) v *= R / std::sqrt(n2);
  return v;
}

int common_dim(const std::vector<AgentProfile>& agents) {
  const int d = agents.front().dim();
  for (const AgentProfile& a : agents)
    if (a.dim() != d)
      throw std::invalid_argument("agents mix feature dimensions");
  return d;
}

}  // namespace

HindsightSolution hindsight_optimum(const std::vector<AgentProfile>& agents,
                                    LossKind kind, double R,
                                    std::int64_t iterations, double tol) {
  if (!(R > 0.0)) throw std::invalid_argument("ball radius must be positive");
  if (iterations < 1)
    throw std::invalid_argument("iteration budget must be >= 1");

  HindsightSolution sol;
  sol.n_agents = static_cast<std::int64_t>(agents.size());
  if (agents.empty()) {
    sol.beta_star = Eigen::VectorXd();
    return sol;
  }

  const int d = common_dim(agents);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);

  double best_upper = std::numeric_limits<double>::infinity();
  double best_lower = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_point = beta;

  // Certificate bookkeeping for the averaged iterate: for any feasible b*,
  //   sum_k <g_k, beta_k - b*>  <=  sum_k <g_k, beta_k> + R ||sum_k g_k||,
  // so F(mean iterate) - (that bound)/k lower-bounds the optimum.
  Eigen::VectorXd g_sum = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd beta_sum = Eigen::VectorXd::Zero(d);
  double g_dot_beta_sum = 0.0;

  auto consider = [&](const Eigen::VectorXd& point, double value,
                      const Eigen::VectorXd& grad) {
    if (value < best_upper) {
      best_upper = value;
      best_point = point;
    }
    best_lower = std::max(best_lower, value - linearization_gap(point, grad, R));
  };

  double G = 0.0;
  std::int64_t k = 0;
  std::int64_t next_check = 1;
  while (k < iterations) {
    ++k;
    const Eigen::VectorXd g = objective_subgradient(agents, kind, beta);
    G = std::max(G, g.norm());
    g_sum += g;
    beta_sum += beta;
    g_dot_beta_sum += g.dot(beta);

    if (k == next_check || k == iterations) {
      next_check *= 2;
      consider(beta, objective(agents, kind, beta), g);
      const Eigen::VectorXd avg = beta_sum / static_cast<double>(k);
      const double avg_value = objective(agents, kind, avg);
      consider(avg, avg_value, objective_subgradient(agents, kind, avg));
      best_lower = std::max(
          best_lower, avg_value - (g_dot_beta_sum + R * g_sum.norm()) /
                                      static_cast<double>(k));
      if (best_upper - best_lower <= tol * (1.0 + std::abs(best_upper))) break;
    }

    if (G == 0.0) break;  // flat at this iterate: certificate already tight
    const double step = R / (G * std::sqrt(static_cast<double>(k)));
    beta = project_ball(beta - step * g, R);
  }

  sol.beta_star = best_point;
  sol.total_loss = best_upper;
  sol.iterations = k;
  sol.certified_gap = std::max(0.0, best_upper - best_lower);
  return sol;
}

HindsightSolution grid_hindsight_optimum(
    const std::vector<AgentProfile>& agents, LossKind kind, double R,
    double resolution) {
  if (!(R > 0.0)) throw std::invalid_argument("ball radius must be positive");
  if (!(resolution > 0.0))
    throw std::invalid_argument("resolution must be positive");

  HindsightSolution sol;
  sol.n_agents = static_cast<std::int64_t>(agents.size());
  if (agents.empty()) {
    sol.beta_star = Eigen::VectorXd();
    return sol;
  }

  const int d = common_dim(agents);
  if (d > 3)
    throw DimensionTooLarge(
        "exhaustive grid search is limited to 3 dimensions");

  // Axis {k * resolution, |k * resolution| <= R}: truncating any feasible
  // point coordinate-wise toward zero lands on an in-ball grid point within
  // resolution per coordinate, which is what the certified gap relies on.
  const std::int64_t K =
      static_cast<std::int64_t>(std::floor(R / resolution + 1e-12));
  const std::int64_t width = 2 * K + 1;

  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_point = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd point(d);
  std::int64_t total = 1;
  for (int i = 0; i < d; ++i) total *= width;
  for (std::int64_t flat = 0; flat < total; ++flat) {
    std::int64_t rem = flat;
    // Lexicographic order over the axis grid so the first strict minimum is
    // the lexicographically smallest among ties.
    for (int i = d - 1; i >= 0; --i) {
      const std::int64_t idx = rem % width;
      rem /= width;
      point(i) = static_cast<double>(idx - K) * resolution;
    }
    if (point.squaredNorm() > R * R) continue;
    const double value = objective(agents, kind, point);
    if (value < best) {
      best = value;
      best_point = point;
    }
  }

  // Summed per-round Lipschitz bounds in beta over the ball.
  double L_F = 0.0;
  for (const AgentProfile& a : agents) {
    const double xn = a.true_features().norm();
    if (a.label() == 1) {
      L_F += xn;
    } else {
      const CostSpec& c = a.cost();
      if (c.r == 1.0)
        throw DegenerateDegree(
            "grid baseline needs finite conjugate powers (r > 1)");
      const double expo = std::max(0.0, 1.0 / c.q - 0.5);
      const double C = std::pow(static_cast<double>(c.dim), expo) / c.eps;
      L_F += xn + c.s * std::pow(C, c.s) * std::pow(R, c.s - 1.0);
    }
  }

  sol.beta_star = best_point;
  sol.total_loss = best;
  sol.iterations = total;
  sol.certified_gap = L_F * resolution * std::sqrt(static_cast<double>(d));
  return sol;
}

Eigen::VectorXd finite_difference_gradient(
    const std::function<double(const Eigen::VectorXd&)>& fn,
    const Eigen::VectorXd& beta, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  Eigen::VectorXd g(beta.size());
  Eigen::VectorXd probe = beta;
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    probe(i) = beta(i) + step;
    const double hi = fn(probe);
    probe(i) = beta(i) - step;
    const double lo = fn(probe);
    probe(i) = beta(i);
    g(i) = (hi - lo) / (2.0 * step);
  }
  return g;
}

Eigen::VectorXd numeric_best_response(const CostSpec& spec,
                                      const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& beta, int steps,
                                      double tol) {
  // Ascends the concave utility with finite-difference gradients only; the
  // closed-form pieces being certified are used solely as the target value.
  const double u_star = x.dot(beta) + conjugate_value(spec, beta);
  auto utility = [&](const Eigen::VectorXd& z) {
    return z.dot(beta) - cost_value(spec, x, z);
  };

  Eigen::VectorXd z = x;
  double u = utility(z);  // cost_value(x, x) == 0
  double step_size = 1.0 / (1.0 + beta.norm());

  for (int it = 0; it < steps; ++it) {
    if (u >= u_star - tol) return z;
    const double h = 1e-6 * (1.0 + z.norm());
    const Eigen::VectorXd g = finite_difference_gradient(utility, z, h);
    const double g2 = g.squaredNorm();
    if (g2 == 0.0) break;
    bool accepted = false;
    while (step_size > 1e-18) {
      const Eigen::VectorXd cand = z + step_size * g;
      const double u_cand = utility(cand);
      if (u_cand > u + 1e-4 * step_size * g2) {
        z = cand;
        u = u_cand;
        step_size *= 1.8;  // let the step grow again after successes
        accepted = true;
        break;
      }
      step_size *= 0.5;
    }
    if (!accepted) break;
  }

  if (u >= u_star - tol) return z;
  std::ostringstream msg;
  msg << "best-response ascent stalled " << (u_star - u)
      << " short of the closed-form supremum (tol " << tol << ")";
  throw NoConvergence(msg.str());
}

double grid_conjugate_value(const CostSpec& spec, const Eigen::VectorXd& beta,
                            int points_per_axis, int refinements) {
  if (spec.dim != 2)
    throw DimensionTooLarge("grid conjugate oracle is implemented for d == 2");
  if (points_per_axis < 9)
    throw std::invalid_argument("points_per_axis too small");
  if (spec.r == 1.0)
    throw DegenerateDegree("grid conjugate oracle needs r > 1");

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  auto maximand = [&](double a, double b) {
    Eigen::VectorXd w(2);
    w << a, b;
    return beta.dot(w) - cost_value(spec, zero, w);
  };

  // Nested scans: recenter on the running argmax each stage, growing the
  // window while the argmax sits on the boundary and halving it otherwise.
  // The maximand is concave, so the returned best value approaches the
  // supremum from below as the spacing shrinks.
  double half_width = 10.0 * std::max(beta.norm(), 0.1);
  double cx = 0.0, cy = 0.0;
  double value = -std::numeric_limits<double>::infinity();
  int expansions = 0;

  for (int stage = 0; stage < refinements;) {
    const double h = 2.0 * half_width / (points_per_axis - 1);
    double best = -std::numeric_limits<double>::infinity();
    int bi = 0, bj = 0;
    for (int i = 0; i < points_per_axis; ++i) {
      const double a = cx - half_width + i * h;
      for (int j = 0; j < points_per_axis; ++j) {
        const double b = cy - half_width + j * h;
        const double v = maximand(a, b);
        if (v > best) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    }
    cx = cx - half_width + bi * h;
    cy = cy - half_width + bj * h;
    value = std::max(value, best);

    const bool on_edge = bi == 0 || bj == 0 || bi == points_per_axis - 1 ||
                         bj == points_per_axis - 1;
    if (on_edge) {
      if (++expansions > 8)
        throw NoConvergence("grid conjugate oracle kept hitting the boundary");
      half_width *= 2.0;  // containment first; do not count as refinement
      continue;
    }
    half_width *= 0.5;
    ++stage;
  }
  return value;
}

}  // namespace stratclass
