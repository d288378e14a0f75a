#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "twistband/strip.hpp"

using namespace twistband;

namespace {

std::map<std::pair<int, int>, double> entry_map(const SparseSym& A) {
  std::map<std::pair<int, int>, double> m;
  for (const auto& t : A.entries) m[{t.row(), t.col()}] += t.value();
  return m;
}

}  // namespace

TEST_CASE("beta-free profile assembles identically to the comparison form") {
  StripDiscretization sd;
  sd.eps = 0.1;
  sd.profile = make_twist_from_beta(beta_zero(1.0));
  sd.L = 8.0;
  sd.ns = 40;
  sd.nt = 32;
  SparseSym c = assemble_c(sd);
  SparseSym d = assemble_d(0.1, 1.0, 8.0, 40, 32);
  auto mc = entry_map(c), md = entry_map(d);
  REQUIRE(mc.size() == md.size());
  for (const auto& [key, v] : mc) {
    REQUIRE(md.count(key) == 1);
    CHECK(std::abs(v - md[key]) < 1e-12 * std::max(1.0, std::abs(v)));
  }
}

TEST_CASE("untwisted strip separates into 1D Dirichlet problems") {
  const double eps = 0.25, L = 6.0;
  const int ns = 48, nt = 32;
  SparseSym A = assemble_d(eps, 0.0, L, ns, nt);
  double l2d = eig_sparse_lowest(A, nullptr, 1, 1e-10, 3).values[0];

  auto box1d = [](double len, int m, double coeff) {
    double h = len / (m + 1);
    TridiagSystem sys;
    sys.diag.assign(m, 2.0 * coeff / (h * h));
    sys.offdiag.assign(m - 1, -coeff / (h * h));
    return eig_tridiag(sys, 1, false).values[0];
  };
  double ls = box1d(2.0 * L, ns, 1.0);
  double lt = box1d(2.0, nt, 1.0 / (eps * eps));
  CHECK(std::abs(l2d - (ls + lt)) < 1e-8 * (ls + lt));
}

TEST_CASE("Dirichlet truncation is monotone in the box length") {
  const double eps = 0.1, gamma = 1.0;
  double l_small =
      eig_sparse_lowest(assemble_d(eps, gamma, 10.0, 200, 32), nullptr, 1,
                        1e-9, 3)
          .values[0];
  double l_large =
      eig_sparse_lowest(assemble_d(eps, gamma, 20.0, 400, 32), nullptr, 1,
                        1e-9, 3)
          .values[0];
  CHECK(l_small >= l_large - 1e-10);
}

TEST_CASE("slowdown pulls an eigenvalue below the grid-matched threshold") {
  const double eps = 0.05, gamma = 1.0;
  StripDiscretization sd;
  sd.eps = eps;
  sd.profile = make_twist_from_beta(beta_triangle(gamma, 1.0, 1.0));
  sd.L = 30.0;
  sd.ns = 600;
  sd.nt = 48;
  double thr = threshold_on_grid(eps, gamma, sd.nt);
  double margin = estimate_truncation_margin(eps, gamma, sd.L, sd.ns, sd.nt);
  SpectrumResult sr = solve_strip(assemble_c(sd), 2, thr, margin);
  REQUIRE(!sr.below_threshold.empty());
  CHECK(sr.below_threshold.front() == 0);
  CHECK(sr.eigenvalues[0] < thr - margin);
  CHECK(margin < 0.1);  // the margin must stay far below the depression depth
}

TEST_CASE("discretization validation") {
  StripDiscretization sd;
  sd.eps = 0.1;
  sd.profile = make_twist_from_beta(beta_zero(1.0));
  sd.ns = 16;  // too coarse
  CHECK_THROWS_AS(sd.validate(), config_error);
  sd.ns = 960;
  sd.L = 3.0;  // too short for the slowdown support
  CHECK_THROWS_AS(sd.validate(), config_error);
}
