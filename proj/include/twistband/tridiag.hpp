#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "twistband/common.hpp"
#include "twistband/eigresult.hpp"

namespace twistband {

struct TridiagSystem {
  std::vector<double> diag;
  std::vector<double> offdiag;  // length diag.size()-1
  double scale = 1.0;
};

namespace detail {

// Number of eigenvalues of the (unscaled) tridiagonal below x.
inline int sturm_count(const std::vector<double>& d,
                       const std::vector<double>& e, double x) {
  int cnt = 0;
  double q = d[0] - x;
  if (q < 0) ++cnt;
  for (std::size_t i = 1; i < d.size(); ++i) {
    double denom = (q == 0.0) ? 1e-300 : q;
    q = d[i] - x - e[i - 1] * e[i - 1] / denom;
    if (q < 0) ++cnt;
  }
  return cnt;
}

// Tridiagonal solve with partial pivoting; rhs overwritten by solution.
inline void tridiag_solve_pivot(std::vector<double> a,  // sub
                                std::vector<double> b,  // diag
                                std::vector<double> c,  // super
                                std::vector<double>& rhs) {
  const std::size_t n = b.size();
  a.resize(n, 0.0);  // pad: pivot rows may touch index n-1
  c.resize(n, 0.0);
  std::vector<double> c2(n, 0.0);  // second superdiagonal from pivoting
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(a[i]) > std::abs(b[i])) {
      std::swap(b[i], a[i]);
      std::swap(c[i], b[i + 1]);
      std::swap(c2[i], c[i + 1]);
      std::swap(rhs[i], rhs[i + 1]);
    }
    if (b[i] == 0.0) b[i] = 1e-300;
    double m = a[i] / b[i];
    b[i + 1] -= m * c[i];
    c[i + 1] -= m * c2[i];
    rhs[i + 1] -= m * rhs[i];
  }
  if (b[n - 1] == 0.0) b[n - 1] = 1e-300;
  rhs[n - 1] /= b[n - 1];
  if (n >= 2) rhs[n - 2] = (rhs[n - 2] - c[n - 2] * rhs[n - 1]) / b[n - 2];
  for (std::size_t k = n; k-- > 2;) {
    std::size_t i = k - 2;
    rhs[i] = (rhs[i] - c[i] * rhs[i + 1] - c2[i] * rhs[i + 2]) / b[i];
  }
}

}  // namespace detail

/// k smallest eigenpairs by Sturm bisection + inverse iteration.
inline EigResult eig_tridiag(const TridiagSystem& sys, int k,
                             bool want_vectors = true, double tol = 1e-10) {
  const auto& d = sys.diag;
  const auto& e = sys.offdiag;
  const int m = static_cast<int>(d.size());
  require(m >= 2, "eig_tridiag: need m >= 2");
  require(static_cast<int>(e.size()) == m - 1,
          "eig_tridiag: offdiag length mismatch");
  require(k >= 1 && k <= m, "eig_tridiag: k out of range");
  for (double v : d) require(finite(v), "eig_tridiag: non-finite diagonal");
  for (double v : e) require(finite(v), "eig_tridiag: non-finite offdiagonal");

  // Gershgorin bounds
  double lo = d[0], hi = d[0];
  for (int i = 0; i < m; ++i) {
    double r = (i > 0 ? std::abs(e[i - 1]) : 0.0) +
               (i < m - 1 ? std::abs(e[i]) : 0.0);
    lo = std::min(lo, d[i] - r);
    hi = std::max(hi, d[i] + r);
  }
  double span = std::max(hi - lo, 1e-300);

  EigResult res;
  res.tolerance = tol;
  res.values.resize(k);
  int total_iters = 0;
  for (int j = 0; j < k; ++j) {
    double a = lo, b = hi;
    while (b - a > 1e-14 * span && b - a > 1e-15 * (std::abs(a) + std::abs(b))) {
      double mid = 0.5 * (a + b);
      if (detail::sturm_count(d, e, mid) >= j + 1)
        b = mid;
      else
        a = mid;
      if (++total_iters > 20000 * k) break;
    }
    res.values[j] = 0.5 * (a + b);
  }
  res.iterations = total_iters;

  if (want_vectors) {
    res.vectors.resize(m, k);
    std::vector<double> sub(e.begin(), e.end()), sup(e.begin(), e.end());
    for (int j = 0; j < k; ++j) {
      double lam = res.values[j];
      double shift = lam + 1e-11 * span;  // keep the solve nonsingular
      std::vector<double> b2(m);
      for (int i = 0; i < m; ++i) b2[i] = d[i] - shift;
      std::vector<double> v(m, 1.0);
      for (int it = 0; it < 3; ++it) {
        detail::tridiag_solve_pivot(sub, b2, sup, v);
        // orthogonalize against earlier vectors (degenerate clusters)
        for (int q = 0; q < j; ++q) {
          double dot = 0.0;
          for (int i = 0; i < m; ++i) dot += v[i] * res.vectors(i, q);
          for (int i = 0; i < m; ++i) v[i] -= dot * res.vectors(i, q);
        }
        double nrm = 0.0;
        for (double x : v) nrm += x * x;
        nrm = std::sqrt(nrm);
        check_numeric(nrm > 0 && finite(nrm),
                      "eig_tridiag: inverse iteration breakdown");
        for (double& x : v) x /= nrm;
      }
      for (int i = 0; i < m; ++i) res.vectors(i, j) = v[i];
    }
    // residuals recomputed from returned pairs
    res.residual_norms.resize(k);
    for (int j = 0; j < k; ++j) {
      double rn = 0.0;
      for (int i = 0; i < m; ++i) {
        double av = d[i] * res.vectors(i, j);
        if (i > 0) av += e[i - 1] * res.vectors(i - 1, j);
        if (i < m - 1) av += e[i] * res.vectors(i + 1, j);
        rn += sq(av - res.values[j] * res.vectors(i, j));
      }
      res.residual_norms[j] = std::sqrt(rn);
    }
  }
  if (sys.scale != 1.0) {
    for (double& v : res.values) v *= sys.scale;
    for (double& r : res.residual_norms) r *= std::abs(sys.scale);
  }
  return res;
}

}  // namespace twistband
