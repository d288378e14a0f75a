#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "twistband/common.hpp"
#include "twistband/eigresult.hpp"

namespace twistband {

/// Symmetric sparse matrix stored as upper-triangle COO entries.
struct SparseSym {
  int n = 0;
  std::vector<Eigen::Triplet<double>> entries;  // row <= col

  void add(int i, int j, double v) {
    if (v == 0.0) return;
    require(i >= 0 && j >= 0 && i < n && j < n, "SparseSym: index out of range");
    require(finite(v), "SparseSym: non-finite entry");
    if (i <= j)
      entries.emplace_back(i, j, v);
    else
      entries.emplace_back(j, i, v);
  }

  Eigen::SparseMatrix<double> full() const {
    Eigen::SparseMatrix<double> U(n, n);
    U.setFromTriplets(entries.begin(), entries.end());
    Eigen::SparseMatrix<double> A = U.selfadjointView<Eigen::Upper>();
    return A;
  }
};

/// k lowest eigenpairs of A v = lambda B v (B = identity when absent) by
/// shift-invert Lanczos with full reorthogonalization and adaptive shift
/// refinement. Deterministic for a fixed seed.
inline EigResult eig_sparse_lowest(const SparseSym& A,
                                   const SparseSym* B = nullptr, int k = 1,
                                   double tol = 1e-8, std::uint64_t seed = 1) {
  const int n = A.n;
  require(k >= 1 && k <= n, "eig_sparse_lowest: k out of range");
  Eigen::SparseMatrix<double> Am = A.full();
  Eigen::SparseMatrix<double> Bm;
  const bool gen = (B != nullptr);
  if (gen) {
    require(B->n == n, "eig_sparse_lowest: B dimension mismatch");
    Bm = B->full();
  }
  Eigen::SparseMatrix<double> Id(n, n);
  Id.setIdentity();

  auto bmul = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return gen ? Eigen::VectorXd(Bm * x) : x;
  };
  auto b_inner = [&](const Eigen::VectorXd& x,
                     const Eigen::VectorXd& y) -> double {
    return gen ? double(x.dot(Bm * y)) : double(x.dot(y));
  };

  double a_scale = 0.0;  // magnitude floor for shift perturbations
  for (int c = 0; c < Am.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(Am, c); it; ++it)
      a_scale = std::max(a_scale, std::abs(it.value()));

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> fact;
  auto factor_at = [&](double sigma) -> bool {
    Eigen::SparseMatrix<double> S =
        (sigma == 0.0) ? Am
                       : Eigen::SparseMatrix<double>(
                             Am - sigma * (gen ? Bm : Id));
    fact.compute(S);
    return fact.info() == Eigen::Success;
  };

  // Initial shift: 0 when A is positive definite, else below the Gershgorin
  // floor so the shifted matrix is.
  double sigma = 0.0;
  bool ok = factor_at(0.0) && fact.vectorD().minCoeff() > 0.0;
  if (!ok) {
    sigma = -2.0 * a_scale - 1.0;
    check_numeric(factor_at(sigma),
                  "eig_sparse_lowest: factorization breakdown");
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd q0(n);
  for (int i = 0; i < n; ++i) q0[i] = gauss(rng);

  EigResult res;
  res.tolerance = tol;

  const int cap = std::min(n, std::max(4 * k + 60, 120));
  const int max_restarts = 4;
  Eigen::MatrixXd ritz_vecs;
  std::vector<double> ritz_vals;
  bool converged = false;
  int total_iters = 0;

  for (int attempt = 0; attempt <= max_restarts && !converged; ++attempt) {
    double qn2 = b_inner(q0, q0);
    check_numeric(qn2 > 0, "eig_sparse_lowest: B not positive definite");
    std::vector<Eigen::VectorXd> basis;
    basis.push_back(q0 / std::sqrt(qn2));
    std::vector<double> alpha, beta;
    bool have_ritz = false;

    int m = 0;
    while (m < cap) {
      Eigen::VectorXd w = fact.solve(bmul(basis[m]));
      double a = b_inner(w, basis[m]);
      w -= a * basis[m];
      if (m > 0) w -= beta[m - 1] * basis[m - 1];
      // full reorthogonalization in the B-inner product
      for (const auto& v : basis) w -= b_inner(w, v) * v;
      for (const auto& v : basis) w -= b_inner(w, v) * v;
      alpha.push_back(a);
      double bn2 = b_inner(w, w);
      check_numeric(bn2 >= 0, "eig_sparse_lowest: B not positive definite");
      double bn = std::sqrt(std::max(bn2, 0.0));
      ++m;
      ++total_iters;
      bool exhausted = (bn < 1e-14) || (m >= cap);

      if (m >= k && (m % 10 == 0 || exhausted || m == 2 * k + 20)) {
        // Ritz pairs of the Lanczos tridiagonal
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) T(i, i) = alpha[i];
        for (int i = 0; i + 1 < m; ++i) T(i, i + 1) = T(i + 1, i) = beta[i];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        // map mu back to lambda = sigma + 1/mu and keep the k smallest
        std::vector<int> ord;
        for (int i = 0; i < m; ++i)
          if (std::abs(es.eigenvalues()[i]) > 1e-300) ord.push_back(i);
        check_numeric(static_cast<int>(ord.size()) >= k,
                      "eig_sparse_lowest: degenerate shift-invert spectrum");
        std::sort(ord.begin(), ord.end(), [&](int a1, int b1) {
          return sigma + 1.0 / es.eigenvalues()[a1] <
                 sigma + 1.0 / es.eigenvalues()[b1];
        });
        ritz_vals.assign(k, 0.0);
        ritz_vecs.resize(n, k);
        have_ritz = true;
        bool conv = true;
        for (int j = 0; j < k; ++j) {
          ritz_vals[j] = sigma + 1.0 / es.eigenvalues()[ord[j]];
          Eigen::VectorXd y = es.eigenvectors().col(ord[j]);
          Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
          for (int i = 0; i < m; ++i) v += y[i] * basis[i];
          ritz_vecs.col(j) = v;
          double rnorm = (Am * v - ritz_vals[j] * bmul(v)).norm() / v.norm();
          double scale = std::max(1.0, std::abs(ritz_vals[j]));
          if (rnorm > tol * scale) conv = false;
        }
        if (conv) {
          converged = true;
          break;
        }
        if (bn < 1e-14) {
          // invariant subspace: Ritz pairs are exact within this space
          converged = true;
          break;
        }
        if (exhausted) break;
      } else if (bn < 1e-14) {
        check_numeric(false,
                      "eig_sparse_lowest: Krylov breakdown before convergence");
      }
      beta.push_back(bn);
      basis.push_back(w / bn);
    }

    if (!converged) {
      check_numeric(attempt < max_restarts && have_ritz,
                    "eig_sparse_lowest: no convergence within iteration cap");
      // refine: refactor just below the current lowest Ritz estimate and
      // restart from its Ritz vector
      double spread = std::max({ritz_vals[k - 1] - ritz_vals[0],
                                1e-6 * std::abs(ritz_vals[0]), 1e-8});
      double target = ritz_vals[0] - spread;
      if (target == sigma) target -= std::max(1.0, 1e-6 * a_scale);
      sigma = target;
      if (!factor_at(sigma)) {
        sigma -= std::max(1.0, std::abs(sigma));
        check_numeric(factor_at(sigma),
                      "eig_sparse_lowest: factorization breakdown");
      }
      q0 = ritz_vecs.col(0);
    }
  }
  res.iterations = total_iters;

  // sort ascending, recompute residuals post-hoc
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return ritz_vals[a] < ritz_vals[b]; });
  res.values.resize(k);
  res.vectors.resize(n, k);
  res.residual_norms.resize(k);
  for (int j = 0; j < k; ++j) {
    res.values[j] = ritz_vals[idx[j]];
    res.vectors.col(j) = ritz_vecs.col(idx[j]);
    Eigen::VectorXd v = res.vectors.col(j);
    res.residual_norms[j] =
        (Am * v - res.values[j] * bmul(v)).norm() / v.norm();
  }
  return res;
}

}  // namespace twistband
