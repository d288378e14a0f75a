#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "twistband/twist_profile.hpp"

using namespace twistband;

TEST_CASE("constant twist has unit norm and constant rate") {
  TwistProfile tp = make_constant_twist(1.5);
  for (double s : {-3.0, -0.7, 0.0, 2.2}) {
    CHECK(std::abs(tp.theta(s).norm() - 1.0) < 1e-12);
    CHECK(tp.dnorm1(s) == 1.5);
    CHECK(tp.dnorm1_prime(s) == 0.0);
  }
}

TEST_CASE("derivative-norm identities for the square-twist profile") {
  TwistProfile tp = make_square_twist();
  for (double s : {-1.3, 0.4, 2.0}) {
    CHECK(std::abs(tp.dnorm1(s) - 2.0 * std::abs(s)) < 1e-12);
    CHECK(std::abs(tp.dnorm2(s) - std::hypot(2.0, 4.0 * s * s)) < 1e-12);
    CHECK(std::abs(tp.dot12(s) - 4.0 * s) < 1e-12);
    // Theta'.Theta''' = alpha' alpha''' - alpha'^4 with alpha''' = 0
    CHECK(std::abs(tp.dot13(s) + std::pow(2.0 * s, 4)) < 1e-10);
    CHECK(std::abs(tp.theta(s).norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("triangle slowdown: moments and the slowdown integral") {
  SlowdownBeta b = beta_triangle(1.0, 1.0, 1.0);
  CHECK(std::abs(b.moment(1) - 1.0) < 1e-13);
  CHECK(std::abs(b.moment(2) - 2.0 / 3.0) < 1e-13);
  // int (|Theta'|^2 - gamma^2) = int (beta^2 - 2 gamma beta) = -4/3
  double v = b.integrate([&](double bb, double) {
    return bb * bb - 2.0 * b.gamma * bb;
  });
  CHECK(std::abs(v + 4.0 / 3.0) < 1e-13);
}

TEST_CASE("signed two-triangle profile balances the mean-square integral") {
  double depth = signed_balanced_depth();
  SlowdownBeta b = beta_two_triangle(1.0, 1.0, depth, 2.0);
  double v = b.integrate([&](double bb, double) {
    return bb * bb - 2.0 * b.gamma * bb;
  });
  CHECK(std::abs(v) < 1e-12);
  // (a^2 + b^2)/3 = a - b is the balance identity behind the depth
  CHECK(std::abs((1.0 + depth * depth) / 3.0 - (1.0 - depth)) < 1e-14);
}

TEST_CASE("profile built from beta reproduces the rate gamma - beta") {
  SlowdownBeta b = beta_triangle(1.0, 0.6, 1.0);
  TwistProfile tp = make_twist_from_beta(b);
  for (double s : {-0.9, -0.2, 0.0, 0.5, 3.0}) {
    CHECK(std::abs(tp.dnorm1(s) - (1.0 - b.beta(s))) < 1e-13);
    CHECK(std::abs(tp.theta(s).norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("invalid slowdowns are rejected") {
  CHECK_THROWS_AS(beta_triangle(1.0, 1.5, 1.0), config_error);  // beta > gamma
  CHECK_THROWS_AS(make_constant_twist(0.0), config_error);
  CHECK_THROWS_AS(beta_table(1.0, {0.0, -1.0}, {0.0, 0.0}), config_error);
}
