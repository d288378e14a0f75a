#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "twistband/certificates.hpp"
#include "twistband/spline.hpp"
#include "twistband/strip.hpp"

using namespace twistband;

TEST_CASE("psi-delta norm identity") {
  TrialFunction tf;
  tf.kind = TrialKind::PsiDelta;
  tf.delta = 0.07;
  tf.beta = beta_triangle(1.0, 1.0, 1.0);
  tf.ground = threshold(0.05, 1.0, 256);
  Certificate lim = limit_prediction(tf);
  CHECK(std::abs(lim.norm2 - (2.0 * tf.beta.s0 + 1.0 / tf.delta)) < 1e-10);
  Certificate c = evaluate_certificate(tf, 0.05);
  CHECK(std::abs(c.norm2 - (2.0 * tf.beta.s0 + 1.0 / tf.delta)) < 1e-10);
}

TEST_CASE("triangle slowdown: negative limit prediction") {
  TrialFunction tf;
  tf.delta = 0.1;
  tf.beta = beta_triangle(1.0, 1.0, 1.0);
  tf.ground = threshold(0.05, 1.0, 256);
  Certificate lim = limit_prediction(tf);
  // delta + (1/2) int (beta^2 - 2 beta) = 0.1 - 2/3
  CHECK(std::abs(lim.limit_raw - (0.1 - 2.0 / 3.0)) < 1e-12);
  CHECK(lim.limit_normalized < 0.0);
}

TEST_CASE("finite-eps gap approaches the limit prediction") {
  TrialFunction tf;
  tf.delta = 0.05;
  tf.beta = beta_triangle(1.0, 1.0, 1.0);
  for (double eps : {0.04, 0.02}) {
    tf.ground = threshold(eps, 1.0, 512);
    Certificate c = evaluate_certificate(tf, eps);
    CHECK(std::abs(c.gap - c.limit_raw) < 0.5 * eps);
    CHECK(c.quad_error < 1e-6);
    CHECK(c.gap < 0.0);
  }
}

TEST_CASE("signed slowdown with eta = sqrt(delta) certifies at small eps") {
  TrialFunction tf;
  tf.kind = TrialKind::PsiDeltaEta;
  tf.delta = 0.04;
  tf.eta = 0.2;
  tf.beta = beta_two_triangle(1.0, 1.0, signed_balanced_depth(), 2.0);
  tf.ground = threshold(0.02, 1.0, 512);
  Certificate c = evaluate_certificate(tf, 0.02);
  CHECK(c.gap < 0.0);
  CHECK(c.limit_raw < 0.0);
}

TEST_CASE("zero slowdown never certifies") {
  std::vector<SweepRow> rows = certificate_sweep(
      beta_zero(1.0), {0.05, 0.1}, {0.05}, TrialKind::PsiDelta, 128);
  for (const auto& r : rows) {
    REQUIRE(r.error.empty());
    CHECK(r.cert.gap > 0.0);
    CHECK(std::abs(r.cert.limit_raw - r.delta) < 1e-12);
  }
}

TEST_CASE("quadrature gap agrees with the assembled form on a grid") {
  const double eps = 0.05, gamma = 1.0;
  TrialFunction tf;
  tf.delta = 0.1;
  tf.beta = beta_triangle(gamma, 1.0, 1.0);
  tf.ground = threshold(eps, gamma, 512);
  Certificate c = evaluate_certificate(tf, eps);

  StripDiscretization sd;
  sd.eps = eps;
  sd.profile = make_twist_from_beta(tf.beta);
  sd.L = 30.0;
  sd.ns = 500;
  sd.nt = 48;
  SparseSym A = assemble_c(sd);
  CubicSpline us(tf.ground.t, tf.ground.u);
  const double hs = 2.0 * sd.L / (sd.ns + 1), ht = 2.0 / (sd.nt + 1);
  Eigen::VectorXd psi(sd.ns * sd.nt);
  for (int i = 0; i < sd.ns; ++i) {
    double phi = tf.phi(-sd.L + (i + 1) * hs);
    for (int j = 0; j < sd.nt; ++j)
      psi[i * sd.nt + j] = phi * us(-1.0 + (j + 1) * ht);
  }
  Eigen::SparseMatrix<double> Am = A.full();
  double rayleigh = psi.dot(Am * psi) / psi.squaredNorm();
  double grid_gap = rayleigh - threshold_on_grid(eps, gamma, sd.nt);
  CHECK(std::abs(grid_gap - c.normalized_gap) < 0.02);
}

TEST_CASE("trial-function validation") {
  TrialFunction tf;
  tf.delta = -0.1;
  tf.beta = beta_zero(1.0);
  tf.ground = threshold(0.05, 1.0, 128);
  CHECK_THROWS_AS(tf.validate(), config_error);
  tf.delta = 0.1;
  tf.ground.gamma = 2.0;  // mismatched profile/ground pair
  CHECK_THROWS_AS(tf.validate(), config_error);
  tf.ground.gamma = 1.0;
  CHECK_THROWS_AS(evaluate_certificate(tf, 0.1), config_error);  // eps mismatch
}
