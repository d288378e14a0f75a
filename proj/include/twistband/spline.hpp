#pragma once

#include <algorithm>
#include <vector>

#include "twistband/common.hpp"

namespace twistband {

/// Natural cubic spline on a strictly increasing knot grid.
class CubicSpline {
 public:
  CubicSpline() = default;

  CubicSpline(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    require(x_.size() == y_.size() && x_.size() >= 3,
            "CubicSpline: need >= 3 matching knots");
    const std::size_t n = x_.size();
    m_.assign(n, 0.0);
    // Thomas solve for second derivatives, natural ends.
    std::vector<double> c(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
      double a = h0 / 6.0, b = (h0 + h1) / 3.0, e = h1 / 6.0;
      double rhs = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
      double w = b - a * c[i - 1];
      c[i] = e / w;
      d[i] = (rhs - a * d[i - 1]) / w;
    }
    for (std::size_t i = n - 2; i >= 1; --i) m_[i] = d[i] - c[i] * m_[i + 1];
  }

  double operator()(double xq) const {
    const std::size_t n = x_.size();
    if (xq <= x_.front()) return y_.front();
    if (xq >= x_.back()) return y_.back();
    std::size_t i =
        std::upper_bound(x_.begin(), x_.end(), xq) - x_.begin() - 1;
    double h = x_[i + 1] - x_[i];
    double A = (x_[i + 1] - xq) / h, B = (xq - x_[i]) / h;
    return A * y_[i] + B * y_[i + 1] +
           ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
  }

 private:
  std::vector<double> x_, y_, m_;
};

}  // namespace twistband
