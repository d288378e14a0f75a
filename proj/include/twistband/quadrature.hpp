#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "twistband/common.hpp"

namespace twistband {

struct GaussRule {
  std::vector<double> nodes;    // on (-1,1)
  std::vector<double> weights;  // sum to 2
};

// Nodes by Newton iteration on Legendre P_n; standard construction.
inline GaussRule make_gauss_rule(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[i] = x;
    r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

inline const GaussRule& gauss_rule(int n) {
  static std::map<int, GaussRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_rule(n)).first;
  return it->second;
}

template <class F>
double quad_gauss(const F& f, double a, double b, int n = 16) {
  const GaussRule& r = gauss_rule(n);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    double v = f(mid + half * r.nodes[i]);
    check_numeric(finite(v), "quad_gauss: non-finite integrand sample");
    acc += r.weights[i] * v;
  }
  return acc * half;
}

template <class F>
double quad_simpson(const F& f, double a, double b, int panels = 64) {
  double h = (b - a) / (2 * panels);
  double acc = f(a) + f(b);
  for (int i = 1; i < 2 * panels; ++i) {
    double v = f(a + i * h);
    check_numeric(finite(v), "quad_simpson: non-finite integrand sample");
    acc += (i % 2 ? 4.0 : 2.0) * v;
  }
  return acc * h / 3.0;
}

// Gauss panels split at the given breakpoints; exact for piecewise
// polynomials of degree <= 2n-1 between breakpoints.
template <class F>
double quad_panels(const F& f, const std::vector<double>& breaks, int n = 16) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    if (breaks[i + 1] > breaks[i]) acc += quad_gauss(f, breaks[i], breaks[i + 1], n);
  return acc;
}

enum class QuadKind { GaussLegendre, CompositeSimpson };

template <class F>
double quad_interval(const F& f, double a, double b, QuadKind rule,
                     int order = 16) {
  return rule == QuadKind::GaussLegendre ? quad_gauss(f, a, b, order)
                                         : quad_simpson(f, a, b, order);
}

}  // namespace twistband
