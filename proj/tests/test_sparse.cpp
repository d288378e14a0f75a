#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "support/dense_oracle.hpp"
#include "twistband/sparse.hpp"

using namespace twistband;

namespace {

SparseSym random_spd(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd R(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) R(i, j) = u(rng);
  Eigen::MatrixXd A = R.transpose() * R + Eigen::MatrixXd::Identity(n, n);
  SparseSym S;
  S.n = n;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) S.add(i, j, A(i, j));
  return S;
}

}  // namespace

TEST_CASE("sparse Lanczos matches the dense oracle on random SPD instances") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> size(30, 200);
  for (int trial = 0; trial < 20; ++trial) {
    int n = size(rng);
    SparseSym A = random_spd(n, rng);
    EigResult r = eig_sparse_lowest(A, nullptr, 3, 1e-9, 1 + trial);
    auto oracle = testing::dense_eigs(A, 3);
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(r.values[j] - oracle[j]) < 1e-8);
  }
}

TEST_CASE("generalized problem with a diagonal mass matrix") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  const int n = 120;
  SparseSym A = random_spd(n, rng);
  SparseSym B;
  B.n = n;
  for (int i = 0; i < n; ++i) B.add(i, i, u(rng));
  EigResult r = eig_sparse_lowest(A, &B, 3, 1e-9, 5);
  auto oracle = testing::dense_eigs(A, 3, &B);
  for (int j = 0; j < 3; ++j)
    CHECK(std::abs(r.values[j] - oracle[j]) < 1e-8);
}

TEST_CASE("2D Dirichlet Laplacian on the unit square") {
  const int m = 24;  // nodes per side
  const double h = 1.0 / (m + 1);
  SparseSym A;
  A.n = m * m;
  auto idx = [m](int i, int j) { return i * m + j; };
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      A.add(idx(i, j), idx(i, j), 4.0 / (h * h));
      if (i + 1 < m) A.add(idx(i, j), idx(i + 1, j), -1.0 / (h * h));
      if (j + 1 < m) A.add(idx(i, j), idx(i, j + 1), -1.0 / (h * h));
    }
  EigResult r = eig_sparse_lowest(A, nullptr, 1, 1e-10, 3);
  double pi = 2.0 * std::acos(0.0);
  double exact = 2.0 * 2.0 / (h * h) * (1.0 - std::cos(pi * h));
  CHECK(std::abs(r.values[0] - exact) < 1e-8 * exact);
  // coarse check against the continuum value 2 pi^2
  CHECK(std::abs(r.values[0] - 2.0 * pi * pi) < 0.05);
}

TEST_CASE("residual norms are reported and small") {
  std::mt19937_64 rng(3);
  SparseSym A = random_spd(80, rng);
  EigResult r = eig_sparse_lowest(A, nullptr, 2, 1e-10, 9);
  REQUIRE(r.residual_norms.size() == 2);
  for (double res : r.residual_norms) CHECK(res < 1e-8 * r.values[1]);
}
