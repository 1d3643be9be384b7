#include <cmath>

#include "doctest.h"
#include "stratclass/baseline.hpp"
#include "stratclass/costs.hpp"
#include "test_support.hpp"

using namespace stratclass;

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_SUITE("costs") {

TEST_CASE("spec construction caches dual exponents and the inverse transform") {
  const CostSpec self = make_cost_spec(2.0, 2.0, Eigen::MatrixXd::Identity(2, 2), 0.5);
  CHECK(self.q == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(self.s == doctest::Approx(2.0).epsilon(1e-15));
  CHECK((self.B - Eigen::MatrixXd::Identity(2, 2)).lpNorm<Eigen::Infinity>() < 1e-12);

  const CostSpec skew = make_cost_spec(3.0, 1.5, Eigen::MatrixXd::Identity(2, 2), 0.5);
  CHECK(skew.q == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(skew.s == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(1.0 / skew.p + 1.0 / skew.q == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(1.0 / skew.r + 1.0 / skew.s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rank-deficient transforms are rejected at construction") {
  Eigen::MatrixXd bad(2, 2);
  bad << 1, 0, 1, 0;
  CHECK_THROWS_AS(make_cost_spec(2.0, 2.0, bad, 0.5), SingularTransform);
  // invertible but with a singular value under the declared floor
  Eigen::MatrixXd thin = Eigen::MatrixXd::Identity(2, 2) * 0.25;
  CHECK_THROWS_AS(make_cost_spec(2.0, 2.0, thin, 0.5), SingularTransform);
}

TEST_CASE("exponents outside the legal range are rejected") {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(make_cost_spec(0.5, 2.0, id, 0.5), InvalidExponent);
  CHECK_THROWS_AS(make_cost_spec(2.0, 0.99, id, 0.5), InvalidExponent);
  // eps is a margin, not an exponent: plain argument error
  CHECK_THROWS_AS(make_cost_spec(2.0, 2.0, id, 0.0), std::invalid_argument);
}

TEST_CASE("cost values follow the scaled norm-power formula") {
  const CostSpec spec = make_cost_spec(2.0, 2.0, Eigen::MatrixXd::Identity(2, 2), 0.5);
  CHECK(cost_value(spec, vec2(0, 0), vec2(3, 4)) == doctest::Approx(12.5).epsilon(1e-15));
  CHECK(cost_value(spec, vec2(0.3, -1.2), vec2(0.3, -1.2)) == 0.0);

  Eigen::MatrixXd diag21(2, 2);
  diag21 << 2, 0, 0, 1;
  const CostSpec one_norm = make_cost_spec(1.0, 2.0, diag21, 0.5);
  CHECK(cost_value(one_norm, vec2(0, 0), vec2(1, 1)) == doctest::Approx(4.5).epsilon(1e-15));
}

TEST_CASE("conjugate values: closed form and brute-force grid supremum agree") {
  const CostSpec quad = make_cost_spec(2.0, 2.0, Eigen::MatrixXd::Identity(2, 2), 0.5);
  CHECK(conjugate_value(quad, vec2(3, 4)) == doctest::Approx(12.5).epsilon(1e-15));
  CHECK(conjugate_value(quad, vec2(0, 0)) == 0.0);

  // degree r=3 gives conjugate degree s=1.5; value at a unit direction is 1/s
  const CostSpec cubic = make_cost_spec(2.0, 3.0, Eigen::MatrixXd::Identity(2, 2), 0.5);
  const double closed = conjugate_value(cubic, vec2(0, 1));
  CHECK(closed == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(std::abs(closed - grid_conjugate_value(cubic, vec2(0, 1))) < 1e-3);

  const CostSpec linear = make_cost_spec(2.0, 1.0, Eigen::MatrixXd::Identity(2, 2), 0.5);
  CHECK_THROWS_AS(conjugate_value(linear, vec2(0, 1)), DegenerateDegree);
}

TEST_CASE("conjugate subgradients match the numeric utility maximizer") {
  const CostSpec quad = make_cost_spec(2.0, 2.0, Eigen::MatrixXd::Identity(2, 2), 0.5);
  CHECK((conjugate_subgradient(quad, vec2(3, 4)) - vec2(3, 4)).norm() < 1e-14);
  CHECK(conjugate_subgradient(quad, vec2(0, 0)).norm() == 0.0);

  Eigen::MatrixXd diag21(2, 2);
  diag21 << 2, 0, 0, 1;
  const CostSpec skew = make_cost_spec(2.0, 2.0, diag21, 0.5);
  const Eigen::VectorXd v = conjugate_subgradient(skew, vec2(2, 1));
  CHECK((v - vec2(0.5, 1.0)).norm() < 1e-12);
  // the subgradient is the displacement of the best response from x = 0
  const Eigen::VectorXd numeric =
      numeric_best_response(skew, vec2(0, 0), vec2(2, 1));
  const double util_numeric = numeric.dot(vec2(2, 1)) - cost_value(skew, vec2(0, 0), numeric);
  const double util_closed = v.dot(vec2(2, 1)) - cost_value(skew, vec2(0, 0), v);
  CHECK(util_closed >= util_numeric - 1e-4);
}

TEST_CASE("best responses: closed form, degenerate degree, and unboundedness") {
  const CostSpec quad = make_cost_spec(2.0, 2.0, Eigen::MatrixXd::Identity(2, 2), 0.5);
  const BestResponse br = best_response(quad, vec2(1, 0), vec2(0, 2));
  CHECK((br.xhat - vec2(1, 2)).norm() < 1e-14);
  CHECK(br.inner == doctest::Approx(4.0).epsilon(1e-15));

  Eigen::MatrixXd diag21(2, 2);
  diag21 << 2, 0, 0, 1;
  const CostSpec skew = make_cost_spec(2.0, 2.0, diag21, 0.5);
  const BestResponse br2 = best_response(skew, vec2(0, 0), vec2(2, 1));
  CHECK((br2.xhat - vec2(0.5, 1.0)).norm() < 1e-12);
  CHECK(br2.inner == doctest::Approx(2.0).epsilon(1e-12));
  // numeric maximization of the utility must reach the conjugate supremum
  // <x, beta> + f*(beta) (= 1 here), distinct from the inner product 2
  const Eigen::VectorXd z = numeric_best_response(skew, vec2(0, 0), vec2(2, 1));
  const double util = z.dot(vec2(2, 1)) - cost_value(skew, vec2(0, 0), z);
  CHECK(std::abs(util - conjugate_value(skew, vec2(2, 1))) < 1e-4);

  const CostSpec linear = make_cost_spec(2.0, 1.0, Eigen::MatrixXd::Identity(2, 2), 0.5);
  const BestResponse stay = best_response(linear, vec2(1, 1), vec2(0.4, 0.3));
  CHECK((stay.xhat - vec2(1, 1)).norm() == 0.0);
  CHECK(stay.inner == doctest::Approx(0.7).epsilon(1e-15));
  CHECK_THROWS_AS(best_response(linear, vec2(1, 1), vec2(0.8, 0.9)), UnboundedResponse);
}

TEST_CASE("scaling a classifier scales the conjugate by its degree") {
  Rng rng(20240801);
  const double alphas[] = {0.5, 2.0, 10.0};
  const double ps[] = {1.0, 1.5, 2.0, 3.0, kInf};
  const double rs[] = {1.5, 2.0, 3.0};
  for (double p : ps)
    for (double r : rs) {
      const int d = 3;
      const CostSpec spec =
          make_cost_spec(p, r, testsup::random_well_conditioned(rng, d), 0.5);
      const Eigen::VectorXd beta = testsup::random_ball_vector(rng, d, 2.0);
      const double base = conjugate_value(spec, beta);
      for (double a : alphas) {
        const double scaled = conjugate_value(spec, a * beta);
        const double expected = std::pow(a, spec.s) * base;
        CHECK(std::abs(scaled - expected) <= 1e-8 * (1.0 + std::abs(expected)));
      }
    }
}

TEST_CASE("subgradients satisfy the degree identity against the value") {
  Rng rng(77001);
  const double ps[] = {1.0, 1.5, 2.0, 3.0, kInf};
  const double rs[] = {1.5, 2.0, 3.0};
  for (double p : ps)
    for (double r : rs)
      for (int d : {2, 5}) {
        const CostSpec spec =
            make_cost_spec(p, r, testsup::random_well_conditioned(rng, d), 0.5);
        for (int k = 0; k < 20; ++k) {
          const Eigen::VectorXd beta = testsup::random_ball_vector(rng, d, 2.0);
          const double target = spec.s * conjugate_value(spec, beta);
          const double pairing = conjugate_subgradient(spec, beta).dot(beta);
          CHECK(std::abs(pairing - target) <= 1e-8 * (1.0 + std::abs(target)));
        }
      }
}

TEST_CASE("no probe point beats the closed-form best response") {
  Rng rng(90125);
  const double ps[] = {1.5, 2.0, 3.0};
  for (double p : ps) {
    const CostSpec spec =
        make_cost_spec(p, 2.0, testsup::random_well_conditioned(rng, 2), 0.5);
    const Eigen::VectorXd x = testsup::random_ball_vector(rng, 2, 1.0);
    const Eigen::VectorXd beta = testsup::random_ball_vector(rng, 2, 2.0);
    const BestResponse br = best_response(spec, x, beta);
    const double best_util = br.xhat.dot(beta) - cost_value(spec, x, br.xhat);
    // attained utility equals <x, beta> + f*(beta); the inner product is the
    // separate quantity <x, beta> + s f*(beta)
    const double u_star = x.dot(beta) + conjugate_value(spec, beta);
    CHECK(std::abs(best_util - u_star) <= 1e-9 * (1.0 + std::abs(u_star)));
    CHECK(std::abs(br.xhat.dot(beta) - br.inner) <=
          1e-9 * (1.0 + std::abs(br.inner)));
    for (int k = 0; k < 1000; ++k) {
      const Eigen::VectorXd z = br.xhat + testsup::random_ball_vector(rng, 2, 3.0);
      const double util = z.dot(beta) - cost_value(spec, x, z);
      CHECK(util <= best_util + 1e-6);
    }
  }
}

TEST_CASE("the response inner product is convex in the classifier") {
  Rng rng(55100);
  const CostSpec spec =
      make_cost_spec(2.0, 1.5, testsup::random_well_conditioned(rng, 2), 0.5);
  const Eigen::VectorXd x = testsup::random_ball_vector(rng, 2, 1.0);
  for (int k = 0; k < 200; ++k) {
    const Eigen::VectorXd b1 = testsup::random_ball_vector(rng, 2, 2.0);
    const Eigen::VectorXd b2 = testsup::random_ball_vector(rng, 2, 2.0);
    const double lam = rng.uniform01();
    const Eigen::VectorXd mid = lam * b1 + (1.0 - lam) * b2;
    const double lhs = best_response(spec, x, mid).inner;
    const double rhs = lam * best_response(spec, x, b1).inner +
                       (1.0 - lam) * best_response(spec, x, b2).inner;
    CHECK(lhs <= rhs + 1e-9);
  }
}

TEST_CASE("norm helper handles the standard exponents") {
  Eigen::VectorXd v(3);
  v << 3, -4, 0;
  CHECK(lp_norm(v, 2.0) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(lp_norm(v, 1.0) == doctest::Approx(7.0).epsilon(1e-15));
  CHECK(lp_norm(v, kInf) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(lp_norm(v, 3.0) == doctest::Approx(std::pow(27.0 + 64.0, 1.0 / 3.0)).epsilon(1e-14));
  CHECK(dual_exponent(1.0) == kInf);
  CHECK(dual_exponent(kInf) == 1.0);
  CHECK(dual_exponent(1.5) == doctest::Approx(3.0).epsilon(1e-14));
}

}  // TEST_SUITE
