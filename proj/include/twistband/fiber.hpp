#pragma once

#include <cmath>
#include <vector>

#include "twistband/common.hpp"
#include "twistband/tridiag.hpp"

namespace twistband {

/// Fiber potential Y_eps^p(t) = p^2/h^2 - 3 g^4 e^2 t^2/(4 h^4) + g^2/(2 h^2)
/// with h(t) = sqrt(1 + g^2 e^2 t^2).
inline double potential_Y(double eps, double gamma, double p, double t) {
  double h2 = 1.0 + sq(gamma * eps * t);
  return p * p / h2 - 3.0 * sq(sq(gamma)) * sq(eps * t) / (4.0 * h2 * h2) +
         sq(gamma) / (2.0 * h2);
}

struct FiberProblem {
  double eps = 0.1;
  double gamma = 1.0;
  double p = 0.0;
  int m = 512;  // interior t nodes

  void validate() const {
    require(eps > 0, "FiberProblem: eps must be positive");
    require(m >= 16, "FiberProblem: m >= 16 required");
  }
};

inline TridiagSystem fiber_matrix(double eps, double gamma, double p, int m) {
  TridiagSystem sys;
  double h = 2.0 / (m + 1);
  double c = 1.0 / (eps * eps * h * h);
  sys.diag.resize(m);
  sys.offdiag.assign(m - 1, -c);
  for (int i = 0; i < m; ++i) {
    double t = -1.0 + (i + 1) * h;
    sys.diag[i] = 2.0 * c + potential_Y(eps, gamma, p, t);
  }
  return sys;
}

struct FiberSolveResult {
  std::vector<double> values;      // Richardson-extrapolated
  std::vector<double> values_fine;  // grid 2m+1
  std::vector<double> values_coarse;
  std::vector<double> err_estimate;  // |extrapolated - fine|
};

/// Lowest n_max fiber eigenvalues; second-order scheme extrapolated over
/// the (m, 2m+1) grid pair.
inline FiberSolveResult solve_fiber(const FiberProblem& fp, int n_max) {
  fp.validate();
  require(n_max >= 1 && n_max <= fp.m / 2, "solve_fiber: n_max out of range");
  EigResult coarse =
      eig_tridiag(fiber_matrix(fp.eps, fp.gamma, fp.p, fp.m), n_max, false);
  EigResult fine = eig_tridiag(
      fiber_matrix(fp.eps, fp.gamma, fp.p, 2 * fp.m + 1), n_max, false);
  FiberSolveResult r;
  r.values_coarse = coarse.values;
  r.values_fine = fine.values;
  for (int i = 0; i < n_max; ++i) {
    double ext = (4.0 * fine.values[i] - coarse.values[i]) / 3.0;
    r.values.push_back(ext);
    r.err_estimate.push_back(std::abs(ext - fine.values[i]));
  }
  return r;
}

struct BandTable {
  double eps = 0.0, gamma = 0.0;
  std::vector<double> p;
  std::vector<std::vector<double>> bands;  // bands[n][ip], n = 0..n_max-1
};

inline std::vector<double> default_p_grid(double eps, double gamma,
                                          int count = 129) {
  double pmax = 8.0 / std::max(1.0, gamma * eps);
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i)
    g[i] = -pmax + 2.0 * pmax * i / (count - 1);
  return g;
}

inline BandTable band_table(double eps, double gamma,
                            const std::vector<double>& p_grid, int n_max,
                            int m = 512, int jobs = 1) {
  require(!p_grid.empty(), "band_table: empty p grid");
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    require(finite(p_grid[i]), "band_table: non-finite p");
    // symmetric about zero
    require(std::abs(p_grid[i] + p_grid[p_grid.size() - 1 - i]) < 1e-12,
            "band_table: p grid must be symmetric about 0");
  }
  BandTable tab;
  tab.eps = eps;
  tab.gamma = gamma;
  tab.p = p_grid;
  tab.bands.assign(n_max, std::vector<double>(p_grid.size(), 0.0));
  std::vector<std::string> failures(p_grid.size());
  parallel_for(p_grid.size(), jobs, [&](std::size_t ip) {
    try {
      FiberProblem fp{eps, gamma, p_grid[ip], m};
      FiberSolveResult r = solve_fiber(fp, n_max);
      for (int n = 0; n < n_max; ++n) tab.bands[n][ip] = r.values[n];
    } catch (const std::exception& e) {
      failures[ip] = e.what();
    }
  });
  for (std::size_t ip = 0; ip < p_grid.size(); ++ip)
    check_numeric(failures[ip].empty(), "band_table: fiber solve failed at p index " +
                                            std::to_string(ip) + ": " +
                                            failures[ip]);
  // explicit lower bound from the analytic band estimate
  for (int n = 0; n < n_max; ++n)
    for (std::size_t ip = 0; ip < p_grid.size(); ++ip) {
      double bound = sq(p_grid[ip]) / (1.0 + sq(gamma * eps)) -
                     eps * eps * sq(sq(gamma));
      check_numeric(tab.bands[n][ip] >= bound - 1e-9 * std::abs(bound),
                    "band_table: band below the analytic lower bound at p index " +
                        std::to_string(ip));
    }
  return tab;
}

/// Ground data of the p = 0 fiber: threshold of the essential spectrum.
struct GroundState {
  double eps = 0.0, gamma = 0.0;
  double lambda1_0 = 0.0;       // Richardson-extrapolated
  double lambda1_0_grid = 0.0;  // on the fine grid (2m+1 nodes)
  double err_estimate = 0.0;
  std::vector<double> t;  // fine-grid nodes including the +-1 endpoints
  std::vector<double> u;  // L2-normalized, positive in the interior
};

inline double positivity_window(double gamma) {
  return gamma > 0 ? std::sqrt(2.0) / gamma
                   : std::numeric_limits<double>::infinity();
}

inline GroundState threshold(double eps, double gamma, int m = 512) {
  require(eps > 0, "threshold: eps must be positive");
  require(eps < positivity_window(gamma),
          "threshold: eps*gamma < sqrt(2) required for a positive potential");
  const int mf = 2 * m + 1;
  EigResult coarse = eig_tridiag(fiber_matrix(eps, gamma, 0.0, m), 1, false);
  EigResult fine = eig_tridiag(fiber_matrix(eps, gamma, 0.0, mf), 1, true);

  GroundState gs;
  gs.eps = eps;
  gs.gamma = gamma;
  gs.lambda1_0_grid = fine.values[0];
  gs.lambda1_0 = (4.0 * fine.values[0] - coarse.values[0]) / 3.0;
  gs.err_estimate = std::abs(gs.lambda1_0 - fine.values[0]);

  double h = 2.0 / (mf + 1);
  double sign = fine.vectors(mf / 2, 0) >= 0 ? 1.0 : -1.0;
  gs.t.resize(mf + 2);
  gs.u.resize(mf + 2);
  gs.t.front() = -1.0;
  gs.u.front() = 0.0;
  for (int i = 0; i < mf; ++i) {
    gs.t[i + 1] = -1.0 + (i + 1) * h;
    gs.u[i + 1] = sign * fine.vectors(i, 0);
    check_numeric(gs.u[i + 1] > 0,
                  "threshold: ground state not positive (eps outside the "
                  "positivity window or discretization fault)");
  }
  gs.t.back() = 1.0;
  gs.u.back() = 0.0;
  // L2(-1,1) normalization (trapezoid on the uniform grid)
  double nrm2 = 0.0;
  for (int i = 0; i + 1 < static_cast<int>(gs.u.size()); ++i)
    nrm2 += 0.5 * (sq(gs.u[i]) + sq(gs.u[i + 1])) * h;
  double nrm = std::sqrt(nrm2);
  for (double& v : gs.u) v /= nrm;
  return gs;
}

/// Non-extrapolated threshold on a specific interior-node count; used for
/// grid-matched comparisons against 2D strip spectra sharing the t grid.
inline double threshold_on_grid(double eps, double gamma, int nt) {
  return eig_tridiag(fiber_matrix(eps, gamma, 0.0, nt), 1, false).values[0];
}

}  // namespace twistband
