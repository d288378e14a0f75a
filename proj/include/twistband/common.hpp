#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace twistband {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

/// Precondition / configuration failure. Mapped to exit code 2 by the CLI.
struct config_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Numeric failure (non-convergence, breakdown). Mapped to exit code 3.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw config_error(msg);
}

inline void check_numeric(bool cond, const std::string& msg) {
  if (!cond) throw numeric_error(msg);
}

inline bool finite(double x) { return std::isfinite(x); }

inline double sq(double x) { return x * x; }

constexpr double half_pi_sq = 2.467401100272339654708622749969;  // (pi/2)^2

inline double half_pi() { return std::acos(0.0); }  // pi/2

// Static partition over [0,n). Tasks must be independent; results are
// written by index so the merge order is deterministic.
inline void parallel_for(std::size_t n, int jobs,
                         const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::size_t nw = std::min<std::size_t>(jobs, n);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (std::size_t w = 0; w < nw; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += nw) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace twistband
