#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "twistband/common.hpp"
#include "twistband/twist_profile.hpp"

namespace twistband {

struct CurveSpec {
  int n = 1;  // number of normal fields; curve lives in R^{n+1}
  std::vector<std::function<double(double)>> curvatures;  // k_j(s), j = 1..n
  Interval support{0.0, 0.0};
};

inline CurveSpec straight_curve(int n = 1) {
  CurveSpec c;
  c.n = n;
  for (int j = 0; j < n; ++j)
    c.curvatures.push_back([](double) { return 0.0; });
  return c;
}

/// Frame and base curve transported along s. frames[i] has rows
/// (T, N_1, ..., N_n) expressed in the ambient basis of R^{n+1}.
struct FramePath {
  int n = 1;
  std::vector<double> s;
  std::vector<Eigen::MatrixXd> frames;
  std::vector<Eigen::VectorXd> gamma;

  double gram_deviation() const {
    double dev = 0.0;
    for (const auto& F : frames) {
      Eigen::MatrixXd G = F * F.transpose();
      dev = std::max(dev, (G - Eigen::MatrixXd::Identity(n + 1, n + 1))
                              .cwiseAbs()
                              .maxCoeff());
    }
    return dev;
  }

  double arclength_deviation() const {
    double dev = 0.0;
    for (const auto& F : frames)
      dev = std::max(dev, std::abs(F.row(0).norm() - 1.0));
    return dev;
  }
};

/// Classical RK4 on the coupled system (frame' = A(k) frame, Gamma' = T).
inline FramePath integrate_frame(const CurveSpec& c, Interval s_range,
                                 double step) {
  require(step > 0, "integrate_frame: step must be positive");
  require(s_range.hi > s_range.lo, "integrate_frame: empty s range");
  const int n = c.n;
  const int d = n + 1;

  auto amat = [&](double s) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
    for (int j = 0; j < n; ++j) {
      double kj = c.curvatures[j](s);
      require(finite(kj), "integrate_frame: non-finite curvature sample");
      A(0, j + 1) = kj;
      A(j + 1, 0) = -kj;
    }
    return A;
  };

  const int nsteps =
      std::max(1, static_cast<int>(std::ceil(s_range.length() / step)));
  const double h = s_range.length() / nsteps;

  FramePath fp;
  fp.n = n;
  Eigen::MatrixXd F = Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd G = Eigen::VectorXd::Zero(d);
  double s = s_range.lo;
  fp.s.push_back(s);
  fp.frames.push_back(F);
  fp.gamma.push_back(G);
  for (int i = 0; i < nsteps; ++i) {
    auto deriv = [&](double ss, const Eigen::MatrixXd& Fc,
                     const Eigen::VectorXd& Gc, Eigen::MatrixXd& dF,
                     Eigen::VectorXd& dG) {
      dF = amat(ss) * Fc;
      dG = Fc.row(0).transpose();
    };
    Eigen::MatrixXd k1F, k2F, k3F, k4F;
    Eigen::VectorXd k1G, k2G, k3G, k4G;
    deriv(s, F, G, k1F, k1G);
    deriv(s + h / 2, F + h / 2 * k1F, G + h / 2 * k1G, k2F, k2G);
    deriv(s + h / 2, F + h / 2 * k2F, G + h / 2 * k2G, k3F, k3G);
    deriv(s + h, F + h * k3F, G + h * k3G, k4F, k4G);
    F += h / 6.0 * (k1F + 2 * k2F + 2 * k3F + k4F);
    G += h / 6.0 * (k1G + 2 * k2G + 2 * k3G + k4G);
    s = s_range.lo + (i + 1) * h;
    fp.s.push_back(s);
    fp.frames.push_back(F);
    fp.gamma.push_back(G);
  }
  return fp;
}

struct SurfaceMesh {
  int ambient_dim = 3;
  std::vector<double> s_coord, t_coord;   // per vertex
  std::vector<Eigen::VectorXd> vertices;  // points in R^{n+1}
  std::vector<std::array<int, 4>> faces;  // 0-based quad indices
  std::vector<double> det_jacobian;       // eps * f_eps per vertex

  double min_det_jacobian() const {
    double m = det_jacobian.empty() ? 0.0 : det_jacobian.front();
    for (double v : det_jacobian) m = std::min(m, v);
    return m;
  }

  // plain-text quad mesh: `v x1 ... x_{n+1}` then `f i j k l` (1-based)
  void write_obj(std::ostream& os) const {
    os.precision(16);
    os << std::scientific;
    for (const auto& p : vertices) {
      os << "v";
      for (int i = 0; i < p.size(); ++i) os << " " << p[i];
      os << "\n";
    }
    for (const auto& f : faces)
      os << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << " "
         << f[3] + 1 << "\n";
  }

  void write_csv(std::ostream& os) const {
    os.precision(16);
    os << std::scientific;
    os << "s,t";
    for (int i = 0; i < ambient_dim; ++i) os << ",x" << i + 1;
    os << ",detJ\n";
    for (std::size_t v = 0; v < vertices.size(); ++v) {
      os << s_coord[v] << "," << t_coord[v];
      for (int i = 0; i < ambient_dim; ++i) os << "," << vertices[v][i];
      os << "," << det_jacobian[v] << "\n";
    }
  }
};

/// Samples L_eps(s,t) = Gamma(s) + N_Theta(s) eps t on the lattice formed by
/// the path's s nodes (optionally strided) and nt uniform t values in [-1,1].
inline SurfaceMesh immersion_sample(const FramePath& fp,
                                    const TwistProfile& tp, double eps,
                                    int nt = 9, int s_stride = 1) {
  require(eps > 0, "immersion_sample: eps must be positive");
  require(nt >= 2, "immersion_sample: need nt >= 2");
  require(tp.dim <= fp.n, "immersion_sample: profile dimension exceeds frame");
  SurfaceMesh mesh;
  mesh.ambient_dim = fp.n + 1;

  std::vector<int> srows;
  for (std::size_t i = 0; i < fp.s.size(); i += s_stride) srows.push_back(i);
  if (srows.back() != static_cast<int>(fp.s.size()) - 1)
    srows.push_back(fp.s.size() - 1);

  for (int si : srows) {
    double s = fp.s[si];
    Eigen::VectorXd th = tp.theta(s);
    Eigen::VectorXd ntheta = Eigen::VectorXd::Zero(fp.n + 1);
    for (int j = 0; j < tp.dim; ++j)
      ntheta += th[j] * fp.frames[si].row(j + 1).transpose();
    for (int jt = 0; jt < nt; ++jt) {
      double t = -1.0 + 2.0 * jt / (nt - 1);
      mesh.s_coord.push_back(s);
      mesh.t_coord.push_back(t);
      mesh.vertices.push_back(fp.gamma[si] + ntheta * eps * t);
      double detj = eps * metric_factor(tp, eps, s, t);
      check_numeric(detj > 0, "immersion_sample: nonpositive det J");
      mesh.det_jacobian.push_back(detj);
    }
  }
  const int rows = static_cast<int>(srows.size());
  for (int i = 0; i + 1 < rows; ++i)
    for (int j = 0; j + 1 < nt; ++j)
      mesh.faces.push_back({i * nt + j, i * nt + j + 1, (i + 1) * nt + j + 1,
                            (i + 1) * nt + j});
  return mesh;
}

}  // namespace twistband
