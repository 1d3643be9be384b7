#include <cmath>

#include "doctest.h"
#include "stratclass/baseline.hpp"
#include "stratclass/costs.hpp"
#include "stratclass/environment.hpp"
#include "stratclass/losses.hpp"
#include "test_support.hpp"

using namespace stratclass;

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

TEST_SUITE("losses") {

TEST_CASE("link values at the anchor points") {
  CHECK(link_value(LossKind::logistic, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(link_value(LossKind::hinge, 1.0) == 0.0);
  CHECK(link_value(LossKind::hinge, -4.0) == doctest::Approx(5.0).epsilon(1e-15));
  // overflow-safe tails
  CHECK(link_value(LossKind::logistic, 1000.0) == doctest::Approx(0.0).epsilon(1e-300));
  CHECK(link_value(LossKind::logistic, -1000.0) == doctest::Approx(1000.0).epsilon(1e-12));
  CHECK(std::isfinite(link_value(LossKind::logistic, -40000.0)));
}

TEST_CASE("observed losses use only the reported features") {
  CHECK(observed_loss(LossKind::hinge, vec2(1, 2), -1, vec2(0, 2)) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(observed_loss(LossKind::logistic, vec2(0, 0), 1, vec2(-3, 7)) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(observed_loss(LossKind::hinge, vec2(1, 0), 1, vec2(2, 0)) == 0.0);
}

TEST_CASE("closed-form gaming loss at hand-checked points") {
  const CostSpec quad = make_cost_spec(2.0, 2.0, Eigen::MatrixXd::Identity(2, 2), 0.5);
  CHECK(strategic_loss_closed_form(quad, LossKind::hinge, vec2(1, 0), vec2(-0.5, 0)) ==
        doctest::Approx(0.75).epsilon(1e-15));
  CHECK(strategic_loss_closed_form(quad, LossKind::logistic, vec2(0.4, -0.9), vec2(0, 0)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(strategic_loss_closed_form(quad, LossKind::hinge, vec2(0, 0), vec2(0, 2)) ==
        doctest::Approx(5.0).epsilon(1e-15));
  const CostSpec linear = make_cost_spec(2.0, 1.0, Eigen::MatrixXd::Identity(2, 2), 0.5);
  CHECK_THROWS_AS(strategic_loss_closed_form(linear, LossKind::hinge, vec2(0, 0), vec2(0, 0)),
                  DegenerateDegree);
}

TEST_CASE("truthful-round subgradients") {
  CHECK((nonstrategic_subgradient(LossKind::logistic, vec2(1, 0), vec2(0, 0)) - vec2(-0.5, 0)).norm() < 1e-15);
  CHECK(nonstrategic_subgradient(LossKind::hinge, vec2(1, 0), vec2(2, 0)).norm() == 0.0);
  CHECK((nonstrategic_subgradient(LossKind::hinge, vec2(1, 1), vec2(0, 0)) - vec2(-1, -1)).norm() == 0.0);
}

TEST_CASE("gaming-round subgradients match finite differences") {
  const CostSpec quad = make_cost_spec(2.0, 2.0, Eigen::MatrixXd::Identity(2, 2), 0.5);

  // stationary point of the one-agent objective
  const Eigen::VectorXd g0 =
      strategic_exact_subgradient(quad, LossKind::hinge, vec2(1, 0), vec2(-0.5, 0));
  CHECK(g0.norm() < 1e-14);

  CHECK(strategic_exact_subgradient(quad, LossKind::logistic, vec2(0, 0), vec2(0, 0)).norm() == 0.0);

  const Eigen::VectorXd g1 =
      strategic_exact_subgradient(quad, LossKind::logistic, vec2(1, 0), vec2(1, 0));
  CHECK((g1 - 3.0 * sigmoid(2.0) * vec2(1, 0)).norm() < 1e-12);

  for (const Eigen::VectorXd& beta : {vec2(-0.5, 0), vec2(1, 0), vec2(0.3, -0.7)}) {
    for (LossKind kind : {LossKind::logistic, LossKind::hinge}) {
      const Eigen::VectorXd x = vec2(1, 0);
      const double z = -(x.dot(beta) + quad.s * conjugate_value(quad, beta));
      if (kind == LossKind::hinge && std::abs(1.0 - z) < 1e-3) continue;  // kink
      const Eigen::VectorXd fd = finite_difference_gradient(
          [&](const Eigen::VectorXd& b) {
            return strategic_loss_closed_form(quad, kind, x, b);
          },
          beta, 1e-5);
      const Eigen::VectorXd an = strategic_exact_subgradient(quad, kind, x, beta);
      CHECK((fd - an).lpNorm<Eigen::Infinity>() < 1e-6);
    }
  }
}

TEST_CASE("bound constants at the pinned configurations") {
  const Eigen::MatrixXd id2 = Eigen::MatrixXd::Identity(2, 2);
  const LossConstants a = constants(make_cost_spec(2.0, 2.0, id2, 1.0), LossKind::logistic, 1.0, 2.0);
  CHECK(a.C == 1.0);
  CHECK(a.M == 7.0);
  CHECK(a.L == 5.0);

  const LossConstants b = constants(make_cost_spec(2.0, 2.0, id2, 0.5), LossKind::logistic, 1.0, 2.0);
  CHECK(b.C == 2.0);
  CHECK(b.M == 19.0);
  CHECK(b.L == 17.0);

  const Eigen::MatrixXd id4 = Eigen::MatrixXd::Identity(4, 4);
  const LossConstants c = constants(make_cost_spec(kInf, 2.0, id4, 1.0), LossKind::hinge, 1.0, 1.0);
  CHECK(c.C == 2.0);
  CHECK(c.M == 6.0);
  CHECK(c.L == 9.0);

  const CostSpec linear = make_cost_spec(2.0, 1.0, id2, 1.0);
  CHECK_THROWS_AS(constants(linear, LossKind::hinge, 1.0, 2.0), DegenerateDegree);
}

TEST_CASE("observing a best response reproduces the closed form exactly") {
  Rng rng(31337);
  for (int k = 0; k < 500; ++k) {
    const double ps[] = {1.5, 2.0, 3.0};
    const double rs[] = {1.5, 2.0, 3.0};
    const CostSpec spec = make_cost_spec(ps[k % 3], rs[(k / 3) % 3],
                                         testsup::random_well_conditioned(rng, 2), 0.5);
    const Eigen::VectorXd x = testsup::random_ball_vector(rng, 2, 1.0);
    const Eigen::VectorXd beta = testsup::random_ball_vector(rng, 2, 2.0);
    const BestResponse br = best_response(spec, x, beta);
    for (LossKind kind : {LossKind::logistic, LossKind::hinge}) {
      const double via_obs = observed_loss(kind, br.xhat, -1, beta);
      const double closed = strategic_loss_closed_form(spec, kind, x, beta);
      CHECK(std::abs(via_obs - closed) <= 1e-12);
    }
  }
}

TEST_CASE("gaming losses are convex along random chords") {
  Rng rng(424242);
  const CostSpec spec =
      make_cost_spec(2.0, 2.0, testsup::random_well_conditioned(rng, 2), 0.5);
  for (LossKind kind : {LossKind::logistic, LossKind::hinge}) {
    for (int k = 0; k < 300; ++k) {
      const Eigen::VectorXd x = testsup::random_ball_vector(rng, 2, 1.0);
      const Eigen::VectorXd b1 = testsup::random_ball_vector(rng, 2, 2.0);
      const Eigen::VectorXd b2 = testsup::random_ball_vector(rng, 2, 2.0);
      const double lam = rng.uniform01();
      const double lhs =
          strategic_loss_closed_form(spec, kind, x, lam * b1 + (1.0 - lam) * b2);
      const double rhs = lam * strategic_loss_closed_form(spec, kind, x, b1) +
                         (1.0 - lam) * strategic_loss_closed_form(spec, kind, x, b2);
      CHECK(lhs <= rhs + 1e-9);
    }
  }
}

TEST_CASE("subgradients minorize both loss families") {
  Rng rng(1123581321);
  const CostSpec spec =
      make_cost_spec(1.5, 2.5, testsup::random_well_conditioned(rng, 2), 0.5);
  for (LossKind kind : {LossKind::logistic, LossKind::hinge}) {
    for (int k = 0; k < 200; ++k) {
      const Eigen::VectorXd x = testsup::random_ball_vector(rng, 2, 1.0);
      const Eigen::VectorXd b1 = testsup::random_ball_vector(rng, 2, 2.0);
      const Eigen::VectorXd b2 = testsup::random_ball_vector(rng, 2, 2.0);

      const double f1 = strategic_loss_closed_form(spec, kind, x, b1);
      const double f2 = strategic_loss_closed_form(spec, kind, x, b2);
      const Eigen::VectorXd g = strategic_exact_subgradient(spec, kind, x, b1);
      CHECK(f2 >= f1 + g.dot(b2 - b1) - 1e-8);

      const double h1 = observed_loss(kind, x, 1, b1);
      const double h2 = observed_loss(kind, x, 1, b2);
      const Eigen::VectorXd gn = nonstrategic_subgradient(kind, x, b1);
      CHECK(h2 >= h1 + gn.dot(b2 - b1) - 1e-8);
    }
  }
}

TEST_CASE("sampled losses respect the declared magnitude and slope bounds") {
  Rng rng(860602);
  const Eigen::MatrixXd id2 = Eigen::MatrixXd::Identity(2, 2);
  const CostSpec spec = make_cost_spec(2.0, 2.0, id2, 1.0);
  const double R1 = 1.0, R2 = 2.0;
  const LossConstants k = constants(spec, LossKind::logistic, R1, R2);
  for (int i = 0; i < 2000; ++i) {
    const Eigen::VectorXd x = testsup::random_ball_vector(rng, 2, R1);
    const Eigen::VectorXd b1 = testsup::random_ball_vector(rng, 2, R2);
    const Eigen::VectorXd b2 = testsup::random_ball_vector(rng, 2, R2);
    for (LossKind kind : {LossKind::logistic, LossKind::hinge}) {
      const double truthful1 = observed_loss(kind, x, 1, b1);
      const double truthful2 = observed_loss(kind, x, 1, b2);
      const double gaming1 = strategic_loss_closed_form(spec, kind, x, b1);
      const double gaming2 = strategic_loss_closed_form(spec, kind, x, b2);
      CHECK(std::abs(truthful1) <= k.M);
      CHECK(std::abs(gaming1) <= k.M);
      const double step = (b1 - b2).norm();
      if (step > 1e-9) {
        CHECK(std::abs(truthful1 - truthful2) <= k.L * step * (1.0 + 1e-6));
        CHECK(std::abs(gaming1 - gaming2) <= k.L * step * (1.0 + 1e-6));
      }
    }
  }
}

}  // TEST_SUITE
