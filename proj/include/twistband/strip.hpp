#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "twistband/common.hpp"
#include "twistband/fiber.hpp"
#include "twistband/sparse.hpp"
#include "twistband/twist_profile.hpp"

namespace twistband {

struct StripDiscretization {
  double eps = 0.1;
  TwistProfile profile;  // beta-slowdown kind for c_eps assembly
  double L = 40.0;       // truncation half-length, Dirichlet at s = +-L
  int ns = 960, nt = 64;

  void validate() const {
    require(eps > 0, "StripDiscretization: eps must be positive");
    require(ns >= 32 && nt >= 32, "StripDiscretization: ns, nt >= 32 required");
    if (profile.slowdown)
      require(L > profile.slowdown->s0 + 5.0,
              "StripDiscretization: L must exceed s0 + 5");
  }
};

namespace detail {

// Form assembly shared by c_eps and d_eps. Edge terms are evaluated at s
// midpoints so the matrix is symmetric by construction; the first-order
// coupling g = d_s f / (2 f) enters through the quadratic form
// |d_s psi - g psi|^2, never through a symmetrized strong form.
inline SparseSym assemble_form(double eps, double L, int ns, int nt,
                               const std::function<double(double)>& rate,
                               const std::function<double(double)>& rate_prime) {
  const double hs = 2.0 * L / (ns + 1);
  const double ht = 2.0 / (nt + 1);
  const int N = ns * nt;
  SparseSym A;
  A.n = N;
  A.entries.reserve(static_cast<std::size_t>(N) * 4);
  auto idx = [nt](int i, int j) { return i * nt + j; };
  std::vector<double> diag(N, 0.0);

  // t-direction: eps^-2 |d_t psi|^2 with Dirichlet ends
  const double ct = 1.0 / (eps * eps * ht * ht);
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < nt; ++j) {
      diag[idx(i, j)] += 2.0 * ct;
      if (j + 1 < nt) A.add(idx(i, j), idx(i, j + 1), -ct);
    }

  // s-direction edges, per t row
  for (int j = 0; j < nt; ++j) {
    const double t = -1.0 + (j + 1) * ht;
    for (int i = 0; i <= ns; ++i) {
      const double smid = -L + (i + 0.5) * hs;
      const double a = rate(smid);
      const double ap = rate_prime(smid);
      check_numeric(finite(a) && finite(ap),
                    "assemble_form: non-finite coefficient (bad beta table?)");
      const double f2 = 1.0 + a * a * eps * eps * t * t;
      const double f = std::sqrt(f2);
      const double dsf = a * ap * eps * eps * t * t / f;
      const double g = dsf / (2.0 * f);
      const double w = 1.0 / f2;
      // w * | (p2 - p1)/hs - g (p1 + p2)/2 |^2
      const double ka = w / (hs * hs);
      const double kb = w * g * g / 4.0;
      const double kc = w * g / hs;
      const bool has1 = (i > 0), has2 = (i < ns);
      if (has1) diag[idx(i - 1, j)] += ka + kb + kc;
      if (has2) diag[idx(i, j)] += ka + kb - kc;
      if (has1 && has2) A.add(idx(i - 1, j), idx(i, j), -ka + kb);
    }
  }

  // potential V = -3 a^4 e^2 t^2 / (4 f^4) + a^2 / (2 f^2)
  for (int i = 0; i < ns; ++i) {
    const double s = -L + (i + 1) * hs;
    const double a = rate(s);
    for (int j = 0; j < nt; ++j) {
      const double t = -1.0 + (j + 1) * ht;
      const double f2 = 1.0 + a * a * eps * eps * t * t;
      const double V =
          -3.0 * sq(sq(a)) * sq(eps * t) / (4.0 * f2 * f2) + a * a / (2.0 * f2);
      diag[idx(i, j)] += V;
    }
  }
  for (int i = 0; i < N; ++i) A.add(i, i, diag[i]);
  return A;
}

}  // namespace detail

/// Finite-difference assembly of the twisted-strip form c_eps on
/// (-L,L) x (-1,1) with Dirichlet boundary.
inline SparseSym assemble_c(const StripDiscretization& sd) {
  sd.validate();
  return detail::assemble_form(sd.eps, sd.L, sd.ns, sd.nt, sd.profile.dnorm1,
                               sd.profile.dnorm1_prime);
}

/// The comparison form d_eps: constant rate gamma, potential Y_eps^0.
inline SparseSym assemble_d(double eps, double gamma, double L, int ns,
                            int nt) {
  return detail::assemble_form(
      eps, L, ns, nt, [gamma](double) { return gamma; },
      [](double) { return 0.0; });
}

struct SpectrumResult {
  std::vector<double> eigenvalues;
  double threshold = 0.0;
  double truncation_margin = 0.0;
  std::vector<int> below_threshold;  // indices with positive margin
  double eps = 0.0, L = 0.0;
  int ns = 0, nt = 0;
};

/// Truncation margin from the beta-free (d_eps) problem: the bias of the
/// Dirichlet box against the grid-matched fiber threshold, together with the
/// L-doubling shift. Shares the t grid with the target problem so the
/// t-discretization error cancels.
inline double estimate_truncation_margin(double eps, double gamma, double L,
                                         int ns, int nt, std::uint64_t seed = 7) {
  double thr = threshold_on_grid(eps, gamma, nt);
  SparseSym a1 = assemble_d(eps, gamma, L, ns, nt);
  SparseSym a2 = assemble_d(eps, gamma, 2.0 * L, 2 * ns, nt);
  double l1 = eig_sparse_lowest(a1, nullptr, 1, 1e-9, seed).values[0];
  double l2 = eig_sparse_lowest(a2, nullptr, 1, 1e-9, seed).values[0];
  return std::max(l1 - l2, l1 - thr);
}

inline SpectrumResult solve_strip(const SparseSym& A, int k, double threshold,
                                  double truncation_margin,
                                  std::uint64_t seed = 7) {
  EigResult er = eig_sparse_lowest(A, nullptr, k, 1e-9, seed);
  SpectrumResult sr;
  sr.eigenvalues = er.values;
  sr.threshold = threshold;
  sr.truncation_margin = truncation_margin;
  for (int j = 0; j < k; ++j)
    if (er.values[j] < threshold - truncation_margin)
      sr.below_threshold.push_back(j);
  return sr;
}

}  // namespace twistband
