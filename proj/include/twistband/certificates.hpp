#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "twistband/common.hpp"
#include "twistband/fiber.hpp"
#include "twistband/quadrature.hpp"
#include "twistband/spline.hpp"
#include "twistband/twist_profile.hpp"

namespace twistband {

enum class TrialKind { PsiDelta, PsiDeltaEta };

/// Exponentially decaying trial function psi(s,t) = phi(s) u(t) built on a
/// slowdown profile; phi = 1 + eta*beta on the core, e^{-delta |s -+ s0|}
/// on the tails.
struct TrialFunction {
  TrialKind kind = TrialKind::PsiDelta;
  double delta = 0.1;
  double eta = 0.0;  // 0 for PsiDelta
  SlowdownBeta beta;
  GroundState ground;

  void validate() const {
    require(delta > 0, "TrialFunction: delta must be positive");
    if (kind == TrialKind::PsiDelta)
      require(eta == 0.0, "TrialFunction: psi-delta has eta = 0");
    else {
      require(eta >= 0, "TrialFunction: eta must be nonnegative");
      for (double v : beta.values)
        require(1.0 + eta * v > 0,
                "TrialFunction: 1 + eta (gamma - |Theta'|) must stay positive");
    }
    require(ground.gamma == beta.gamma,
            "TrialFunction: ground state gamma does not match the profile");
  }

  double phi(double s) const {
    if (s < -beta.s0) return std::exp(delta * (s + beta.s0));
    if (s > beta.s0) return std::exp(-delta * (s - beta.s0));
    return 1.0 + eta * beta.beta(s);
  }
  double phi_prime_core(double s) const { return eta * beta.beta_prime(s); }
};

struct Certificate {
  double gap = 0.0;    // c_eps(psi) - lambda_{eps,1}(0) ||psi||^2
  double norm2 = 0.0;  // ||psi||^2
  double normalized_gap = 0.0;
  double limit_raw = 0.0;         // eps -> 0 limit of the un-normalized gap
  double limit_normalized = 0.0;  // same, divided by the limit norm
  double quad_error = 0.0;
};

namespace detail {

struct TGrid {
  std::vector<double> nodes, weights, u2;  // u^2 at composite Gauss nodes
};

inline TGrid make_tgrid(const GroundState& gs, int panels, int order) {
  CubicSpline us(gs.t, gs.u);
  TGrid g;
  const GaussRule& r = gauss_rule(order);
  for (int p = 0; p < panels; ++p) {
    double a = -1.0 + 2.0 * p / panels, b = -1.0 + 2.0 * (p + 1) / panels;
    for (int i = 0; i < order; ++i) {
      double t = 0.5 * (a + b) + 0.5 * (b - a) * r.nodes[i];
      g.nodes.push_back(t);
      g.weights.push_back(0.5 * (b - a) * r.weights[i]);
      g.u2.push_back(sq(us(t)));
    }
  }
  return g;
}

inline Certificate certificate_pass(const TrialFunction& tf, double eps,
                                    int s_order, int t_panels, int t_order) {
  const SlowdownBeta& sb = tf.beta;
  const double gamma = sb.gamma;
  const double s0 = sb.s0;
  TGrid tg = make_tgrid(tf.ground, t_panels, t_order);

  auto tint = [&](const std::function<double(double)>& w) {
    double acc = 0.0;
    for (std::size_t i = 0; i < tg.nodes.size(); ++i)
      acc += tg.weights[i] * tg.u2[i] * w(tg.nodes[i]);
    return acc;
  };

  // t-profiles for a given twist rate a = |Theta'(s)| and its s-derivative
  auto term_weights = [&](double a, double ap, double& w1, double& w2,
                          double& w3, double& w4) {
    w1 = tint([&](double t) { return 1.0 / (1.0 + sq(a * eps * t)); });
    w2 = tint([&](double t) {
      double f2 = 1.0 + sq(a * eps * t);
      double dsf2 = sq(a * ap * sq(eps * t)) / f2;  // (d_s f)^2
      return 0.25 * dsf2 / (f2 * f2);
    });
    w3 = tint([&](double t) {
      double f2 = 1.0 + sq(a * eps * t);
      double dsf = a * ap * sq(eps * t) / std::sqrt(f2);
      return dsf / (f2 * std::sqrt(f2));
    });
    w4 = tint([&](double t) {
      double f2 = 1.0 + sq(a * eps * t);
      double V = -3.0 * sq(sq(a)) * sq(eps * t) / (4.0 * f2 * f2) +
                 a * a / (2.0 * f2);
      return V - potential_Y(eps, gamma, 0.0, t);
    });
  };

  // core: tensor quadrature split at the beta knots
  double core = 0.0, core_norm = 0.0;
  std::vector<double> breaks = sb.knots;
  if (breaks.front() > -s0) breaks.insert(breaks.begin(), -s0);
  if (breaks.back() < s0) breaks.push_back(s0);
  for (std::size_t seg = 0; seg + 1 < breaks.size(); ++seg) {
    core += quad_gauss(
        [&](double s) {
          double a = gamma - sb.beta(s);
          double ap = -sb.beta_prime(s);
          double w1, w2, w3, w4;
          term_weights(a, ap, w1, w2, w3, w4);
          double ph = tf.phi(s), php = tf.phi_prime_core(s);
          return php * php * w1 + ph * ph * w2 - ph * php * w3 + ph * ph * w4;
        },
        breaks[seg], breaks[seg + 1], s_order);
    core_norm += quad_gauss([&](double s) { return sq(tf.phi(s)); },
                            breaks[seg], breaks[seg + 1], s_order);
  }

  // tails: |Theta'| = gamma there, so f = h(t), d_s f = 0, V = Y^0; only the
  // kinetic term survives and integrates in closed form:
  //   int phi'^2 over both tails = delta,  int phi^2 = 1/delta.
  double w1g = tint(
      [&](double t) { return 1.0 / (1.0 + sq(gamma * eps * t)); });
  double gap = core + tf.delta * w1g;
  double norm2 = core_norm + 1.0 / tf.delta;

  Certificate c;
  c.gap = gap;
  c.norm2 = norm2;
  c.normalized_gap = gap / norm2;
  return c;
}

}  // namespace detail

/// eps -> 0 limit of the gap for the given trial shape: every coefficient
/// collapses (f -> 1, V - Y^0 -> (|Theta'|^2 - gamma^2)/2) and the result is
/// a polynomial in the beta moments, evaluated by exact piecewise quadrature.
inline Certificate limit_prediction(const TrialFunction& tf) {
  tf.validate();
  const SlowdownBeta& sb = tf.beta;
  double g = sb.gamma, d = tf.delta, e = tf.eta;
  double kinetic = e * e * sb.int_beta_prime_sq();
  double potential = 0.5 * sb.integrate([&](double b, double) {
    return sq(1.0 + e * b) * (b * b - 2.0 * g * b);
  });
  double raw = d + kinetic + potential;
  double norm = 2.0 * sb.s0 + 1.0 / d +
                sb.integrate([&](double b, double) {
                  return sq(1.0 + e * b) - 1.0;
                });
  Certificate c;
  c.limit_raw = raw;
  c.limit_normalized = raw / norm;
  c.norm2 = norm;
  return c;
}

/// Gap of the expanded variational expression, by tensor quadrature; the
/// error field compares two quadrature resolutions.
inline Certificate evaluate_certificate(const TrialFunction& tf, double eps) {
  tf.validate();
  require(eps > 0, "evaluate_certificate: eps must be positive");
  require(tf.ground.eps == eps,
          "evaluate_certificate: ground state eps does not match");
  Certificate fine = detail::certificate_pass(tf, eps, 16, 32, 8);
  Certificate coarse = detail::certificate_pass(tf, eps, 8, 16, 8);
  fine.quad_error = std::abs(fine.normalized_gap - coarse.normalized_gap);
  Certificate lim = limit_prediction(tf);
  fine.limit_raw = lim.limit_raw;
  fine.limit_normalized = lim.limit_normalized;
  return fine;
}

struct SweepRow {
  double delta = 0.0, eta = 0.0, eps = 0.0;
  Certificate cert;
  std::string error;  // nonempty when this cell failed
};

inline std::vector<SweepRow> certificate_sweep(
    const SlowdownBeta& sb, const std::vector<double>& delta_grid,
    const std::vector<double>& eps_grid, TrialKind kind, int fiber_m = 512,
    int jobs = 1) {
  require(!delta_grid.empty() && !eps_grid.empty(),
          "certificate_sweep: empty grid");
  std::vector<SweepRow> rows(delta_grid.size() * eps_grid.size());
  parallel_for(rows.size(), jobs, [&](std::size_t cell) {
    std::size_t id = cell / eps_grid.size(), ie = cell % eps_grid.size();
    SweepRow& row = rows[cell];
    row.delta = delta_grid[id];
    row.eps = eps_grid[ie];
    row.eta = (kind == TrialKind::PsiDeltaEta) ? std::sqrt(row.delta) : 0.0;
    try {
      TrialFunction tf;
      tf.kind = kind;
      tf.delta = row.delta;
      tf.eta = row.eta;
      tf.beta = sb;
      tf.ground = threshold(row.eps, sb.gamma, fiber_m);
      row.cert = evaluate_certificate(tf, row.eps);
    } catch (const std::exception& ex) {
      row.error = ex.what();
    }
  });
  return rows;
}

}  // namespace twistband
