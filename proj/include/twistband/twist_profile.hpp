#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "twistband/common.hpp"
#include "twistband/quadrature.hpp"

namespace twistband {

enum class TwistKind { ConstantRate, BetaSlowdown, ClosedForm, Table };

/// Compactly supported slowdown profile, stored piecewise linear. All the
/// variational quantities of interest only need low moments of beta, which
/// are exact for this representation.
struct SlowdownBeta {
  double gamma = 1.0;
  double s0 = 1.0;
  double beta_prime_bound = 0.0;
  std::vector<double> knots;   // increasing; beta = 0 outside [knots.front(), knots.back()]
  std::vector<double> values;  // values.front() == values.back() == 0

  double beta(double s) const {
    if (knots.empty() || s <= knots.front() || s >= knots.back()) return 0.0;
    std::size_t i = std::upper_bound(knots.begin(), knots.end(), s) -
                    knots.begin() - 1;
    double w = (s - knots[i]) / (knots[i + 1] - knots[i]);
    return (1.0 - w) * values[i] + w * values[i + 1];
  }

  double beta_prime(double s) const {
    if (knots.empty() || s <= knots.front() || s >= knots.back()) return 0.0;
    std::size_t i = std::upper_bound(knots.begin(), knots.end(), s) -
                    knots.begin() - 1;
    return (values[i + 1] - values[i]) / (knots[i + 1] - knots[i]);
  }

  // int_0^s beta
  double beta_integral(double s) const {
    auto cum = [&](double x) {  // int_{knots.front()}^{x}
      if (knots.empty() || x <= knots.front()) return 0.0;
      double acc = 0.0;
      for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        double a = knots[i], b = std::min(x, knots[i + 1]);
        if (b <= a) break;
        acc += 0.5 * (beta(a) + beta(b)) * (b - a);
        if (x <= knots[i + 1]) break;
      }
      return acc;
    };
    return cum(s) - cum(0.0);
  }

  // int f(beta(s), beta'(s)) ds over the support, split at the knots
  double integrate(const std::function<double(double, double)>& f,
                   int order = 8) const {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
      acc += quad_gauss(
          [&](double s) { return f(beta(s), beta_prime(s)); }, knots[i],
          knots[i + 1], order);
    return acc;
  }

  double moment(int p) const {
    return integrate([p](double b, double) { return std::pow(b, p); });
  }

  double int_beta_prime_sq() const {
    return integrate([](double, double bp) { return bp * bp; });
  }

  void validate() const {
    require(gamma > 0, "SlowdownBeta: gamma must be positive");
    require(knots.size() == values.size() && knots.size() >= 2,
            "SlowdownBeta: knot/value size mismatch");
    require(values.front() == 0.0 && values.back() == 0.0,
            "SlowdownBeta: beta must vanish at the support ends");
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      require(knots[i + 1] > knots[i], "SlowdownBeta: knots must increase");
      double slope = (values[i + 1] - values[i]) / (knots[i + 1] - knots[i]);
      require(std::abs(slope) <= beta_prime_bound + 1e-12,
              "SlowdownBeta: beta_prime_bound violated");
    }
    require(s0 >= std::max(std::abs(knots.front()), std::abs(knots.back())),
            "SlowdownBeta: support exceeds [-s0, s0]");
    for (double v : values)
      require(gamma - v >= 0,
              "SlowdownBeta: gamma - beta < 0 (|Theta'| is a norm)");
  }
};

inline SlowdownBeta beta_zero(double gamma, double s0 = 1.0) {
  SlowdownBeta b;
  b.gamma = gamma;
  b.s0 = s0;
  b.beta_prime_bound = 0.0;
  b.knots = {-s0, s0};
  b.values = {0.0, 0.0};
  b.validate();
  return b;
}

inline SlowdownBeta beta_triangle(double gamma, double height,
                                  double halfwidth = 1.0) {
  SlowdownBeta b;
  b.gamma = gamma;
  b.s0 = halfwidth;
  b.beta_prime_bound = std::abs(height) / halfwidth;
  b.knots = {-halfwidth, 0.0, halfwidth};
  b.values = {0.0, height, 0.0};
  b.validate();
  return b;
}

inline SlowdownBeta beta_plateau(double gamma, double height, double core,
                                 double ramp) {
  SlowdownBeta b;
  b.gamma = gamma;
  b.s0 = core + ramp;
  b.beta_prime_bound = std::abs(height) / ramp;
  b.knots = {-core - ramp, -core, core, core + ramp};
  b.values = {0.0, height, height, 0.0};
  b.validate();
  return b;
}

/// Two opposite triangles (positive height a on the left, depth -b on the
/// right), each of base width `width`.
inline SlowdownBeta beta_two_triangle(double gamma, double a, double b,
                                      double width = 2.0) {
  SlowdownBeta sb;
  sb.gamma = gamma;
  sb.s0 = width;
  sb.beta_prime_bound = 2.0 * std::max(a, b) / width;
  sb.knots = {-width, -width / 2, 0.0, width / 2, width};
  sb.values = {0.0, a, 0.0, -b, 0.0};
  sb.validate();
  return sb;
}

/// Balancing depth for the zero-mean-square instance: with unit left height
/// and gamma = 1, (a^2 + b^2)/3 = a - b forces b = (sqrt(17) - 3)/2.
inline double signed_balanced_depth() { return (std::sqrt(17.0) - 3.0) / 2.0; }

inline SlowdownBeta beta_table(double gamma, std::vector<double> knots,
                               std::vector<double> values) {
  SlowdownBeta b;
  b.gamma = gamma;
  b.knots = std::move(knots);
  b.values = std::move(values);
  require(!b.knots.empty(), "beta_table: empty table");
  b.s0 = std::max(std::abs(b.knots.front()), std::abs(b.knots.back()));
  double bound = 0.0;
  for (std::size_t i = 0; i + 1 < b.knots.size(); ++i)
    bound = std::max(bound, std::abs((b.values[i + 1] - b.values[i]) /
                                     (b.knots[i + 1] - b.knots[i])));
  b.beta_prime_bound = bound;
  b.validate();
  return b;
}

/// Twisting vector with analytically supplied derivative data. dot12 and
/// dot13 are Theta'.Theta'' and Theta'.Theta''', needed by the thin-limit
/// potential; dnorm1_prime is d|Theta'|/ds, needed by d_s f.
struct TwistProfile {
  int dim = 2;
  TwistKind kind = TwistKind::ClosedForm;
  std::function<Eigen::VectorXd(double)> theta;
  std::function<double(double)> dnorm1, dnorm2, dnorm3;
  std::function<double(double)> dnorm1_prime;
  std::function<double(double)> dot12, dot13;
  std::optional<SlowdownBeta> slowdown;  // present for BetaSlowdown kind
};

/// Planar profile Theta = (cos alpha, sin alpha) from the turning angle and
/// its derivatives.
inline TwistProfile make_angle_profile(std::function<double(double)> alpha,
                                       std::function<double(double)> a1,
                                       std::function<double(double)> a2,
                                       std::function<double(double)> a3,
                                       TwistKind kind) {
  TwistProfile tp;
  tp.dim = 2;
  tp.kind = kind;
  tp.theta = [alpha](double s) {
    Eigen::VectorXd v(2);
    v << std::cos(alpha(s)), std::sin(alpha(s));
    return v;
  };
  tp.dnorm1 = [a1](double s) { return std::abs(a1(s)); };
  tp.dnorm2 = [a1, a2](double s) { return std::hypot(a2(s), sq(a1(s))); };
  tp.dnorm3 = [a1, a2, a3](double s) {
    double p1 = a1(s), p2 = a2(s), p3 = a3(s);
    return std::sqrt(sq(p3 - p1 * p1 * p1) + 9.0 * p1 * p1 * p2 * p2);
  };
  tp.dnorm1_prime = [a1, a2](double s) {
    return (a1(s) >= 0 ? 1.0 : -1.0) * a2(s);
  };
  tp.dot12 = [a1, a2](double s) { return a1(s) * a2(s); };
  tp.dot13 = [a1, a3](double s) {
    double p1 = a1(s);
    return p1 * a3(s) - p1 * p1 * p1 * p1;
  };
  return tp;
}

inline TwistProfile make_constant_twist(double gamma, int n = 2) {
  require(gamma > 0, "make_constant_twist: gamma must be positive");
  require(n >= 2,
          "make_constant_twist: n >= 2 required (unit norm with nonzero rate)");
  TwistProfile tp = make_angle_profile(
      [gamma](double s) { return gamma * s; }, [gamma](double) { return gamma; },
      [](double) { return 0.0; }, [](double) { return 0.0; },
      TwistKind::ConstantRate);
  if (n > 2) {
    auto base = tp.theta;
    tp.dim = n;
    tp.theta = [base, n](double s) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
      v.head(2) = base(s);
      return v;
    };
  }
  return tp;
}

inline TwistProfile make_twist_from_beta(const SlowdownBeta& b) {
  b.validate();
  for (std::size_t i = 0; i < b.knots.size(); ++i)
    require(b.gamma - b.values[i] >= 0,
            "make_twist_from_beta: gamma - beta < 0 at a node");
  SlowdownBeta copy = b;
  TwistProfile tp = make_angle_profile(
      [copy](double s) { return copy.gamma * s - copy.beta_integral(s); },
      [copy](double s) { return copy.gamma - copy.beta(s); },
      [copy](double s) { return -copy.beta_prime(s); },
      [](double) { return 0.0; }, TwistKind::BetaSlowdown);
  tp.slowdown = copy;
  return tp;
}

inline TwistProfile make_square_twist() {
  return make_angle_profile([](double s) { return s * s; },
                            [](double s) { return 2.0 * s; },
                            [](double) { return 2.0; },
                            [](double) { return 0.0; }, TwistKind::ClosedForm);
}

/// f_eps(s,t) = sqrt(1 + |Theta'(s)|^2 eps^2 t^2) >= 1
inline double metric_factor(const TwistProfile& tp, double eps, double s,
                            double t) {
  require(eps > 0, "metric_factor: eps must be positive");
  return std::sqrt(1.0 + sq(tp.dnorm1(s)) * eps * eps * t * t);
}

}  // namespace twistband
