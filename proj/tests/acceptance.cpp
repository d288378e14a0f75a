// Acceptance gate: one line per criterion, PASS/FAIL, nonzero exit on any
// failure. Each block is self-contained and prints the quantities it judged.

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "support/dense_oracle.hpp"
#include "twistband/certificates.hpp"
#include "twistband/fiber.hpp"
#include "twistband/frame.hpp"
#include "twistband/spline.hpp"
#include "twistband/strip.hpp"
#include "twistband/thin_limit.hpp"

using namespace twistband;

namespace {

int g_failures = 0;

void criterion(int id, const std::string& name,
               const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  std::printf("%s criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", id,
              name.c_str(), detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double fit_exponent(const std::vector<double>& x,
                    const std::vector<double>& y) {
  // least-squares slope of log y against log x
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

const double kPi = 2.0 * std::acos(0.0);

}  // namespace

int main() {
  criterion(1, "untwisted fiber eigenvalues are (n pi)^2 + p^2", [](std::string& d) {
    bool ok = true;
    double worst = 0.0;
    for (double p : {0.0, 1.0, 2.0}) {
      FiberSolveResult r = solve_fiber({0.5, 0.0, p, 512}, 4);
      for (int n = 1; n <= 4; ++n) {
        double exact = sq(n * kPi) + p * p;
        double rel = std::abs(r.values[n - 1] - exact) / exact;
        worst = std::max(worst, rel);
        ok = ok && rel < 1e-5;
      }
    }
    d = "max relative error " + std::to_string(worst);
    return ok;
  });

  criterion(2, "threshold window above the box value with quadratic decay",
            [](std::string& d) {
    std::vector<double> eps = {0.2, 0.1, 0.05, 0.025}, excess;
    bool positive = true;
    for (double e : eps) {
      GroundState gs = threshold(e, 1.0, 512);
      double v = e * e * gs.lambda1_0 - half_pi_sq;
      positive = positive && v > 0;
      excess.push_back(v);
    }
    double slope = fit_exponent(eps, excess);
    d = "fit exponent " + std::to_string(slope);
    return positive && slope >= 1.8 && slope <= 2.2;
  });

  criterion(3, "band minimum at p = 0 and clean comparison spectrum",
            [](std::string& d) {
    bool ok = true;
    for (double gamma : {0.5, 1.0, 2.0}) {
      BandTable tab =
          band_table(0.1, gamma, default_p_grid(0.1, gamma), 1, 512, 4);
      std::size_t np = tab.p.size(), mid = np / 2;
      for (std::size_t i = 0; i < np; ++i)
        ok = ok && tab.bands[0][i] >= tab.bands[0][mid] - 1e-9;
      for (std::size_t i = mid; i + 1 < np; ++i)
        ok = ok && tab.bands[0][i + 1] >= tab.bands[0][i] - 1e-7;
    }
    const double eps = 0.1, gamma = 1.0, L = 40.0;
    const int ns = 960, nt = 64;
    double thr = threshold_on_grid(eps, gamma, nt);
    double margin = estimate_truncation_margin(eps, gamma, L, ns, nt);
    SpectrumResult sr =
        solve_strip(assemble_d(eps, gamma, L, ns, nt), 3, thr, margin);
    d = "margin " + std::to_string(margin) + ", flagged " +
        std::to_string(sr.below_threshold.size());
    return ok && sr.below_threshold.empty();
  });

  criterion(4, "triangle slowdown certifies and the 2D spectrum dips",
            [](std::string& d) {
    const double eps = 0.05, gamma = 1.0;
    TrialFunction tf;
    tf.delta = 0.05;
    tf.beta = beta_triangle(gamma, 1.0, 1.0);
    tf.ground = threshold(eps, gamma, 512);
    Certificate cert = evaluate_certificate(tf, eps);
    bool cert_ok = cert.normalized_gap < 0.0;

    StripDiscretization sd;
    sd.eps = eps;
    sd.profile = make_twist_from_beta(tf.beta);
    sd.L = 40.0;
    sd.ns = 960;
    sd.nt = 64;
    double thr = threshold_on_grid(eps, gamma, sd.nt);
    double margin = estimate_truncation_margin(eps, gamma, sd.L, sd.ns, sd.nt);
    SparseSym A = assemble_c(sd);
    SpectrumResult sr = solve_strip(A, 2, thr, margin);
    bool dip_ok = !sr.below_threshold.empty() && sr.below_threshold[0] == 0;

    // trial-function Rayleigh quotient must upper-bound the ground state
    CubicSpline us(tf.ground.t, tf.ground.u);
    const double hs = 2.0 * sd.L / (sd.ns + 1), ht = 2.0 / (sd.nt + 1);
    Eigen::VectorXd psi(sd.ns * sd.nt);
    for (int i = 0; i < sd.ns; ++i) {
      double phi = tf.phi(-sd.L + (i + 1) * hs);
      for (int j = 0; j < sd.nt; ++j)
        psi[i * sd.nt + j] = phi * us(-1.0 + (j + 1) * ht);
    }
    Eigen::SparseMatrix<double> Am = A.full();
    double rayleigh = psi.dot(Am * psi) / psi.squaredNorm();
    bool bound_ok = sr.eigenvalues[0] <= rayleigh + 1e-9;

    d = "normalized gap " + std::to_string(cert.normalized_gap) +
        ", 2D depression " + std::to_string(thr - sr.eigenvalues[0]) +
        ", margin " + std::to_string(margin);
    return cert_ok && dip_ok && bound_ok;
  });

  criterion(5, "signed slowdown with zero mean-square excess certifies",
            [](std::string& d) {
    SlowdownBeta sb = beta_two_triangle(1.0, 1.0, signed_balanced_depth(), 2.0);
    TwistProfile tp = make_twist_from_beta(sb);
    double excess = quad_panels(
        [&](double s) { return sq(tp.dnorm1(s)) - sq(sb.gamma); }, sb.knots, 8);
    TrialFunction tf;
    tf.kind = TrialKind::PsiDeltaEta;
    tf.delta = 0.04;
    tf.eta = std::sqrt(tf.delta);
    tf.beta = sb;
    tf.ground = threshold(0.02, 1.0, 512);
    Certificate cert = evaluate_certificate(tf, 0.02);
    d = "excess integral " + std::to_string(excess) + ", gap " +
        std::to_string(cert.gap);
    return std::abs(excess) < 1e-8 && cert.gap < 0.0;
  });

  criterion(6, "thin-limit eigenvalues converge to sqrt(2)(2j - 1)",
            [](std::string& d) {
    MollifiedFamily mf = make_square_twist_family(0.25, 10.0);
    std::vector<double> eps = {0.1, 0.05, 0.025};
    std::vector<std::vector<double>> lamM;
    bool bracket = true;
    for (double e : eps) {
      TwistProfile th = mf.member(e);
      Spectrum1DResult um = solve_upper_M(e, th, 3);
      EffectiveOperator eo;
      eo.potential = [th](double s) { return 0.5 * sq(th.dnorm1(s)); };
      Spectrum1DResult ef = effective_spectrum(eo, 3);
      for (int j = 0; j < 3; ++j) {
        double band = mf.K * std::pow(e, 1.0 - mf.a);
        double slack = mf.K * std::pow(e, 2.0 - 4.0 * mf.a);
        bracket = bracket &&
                  um.values[j] >= ef.values[j] * (1.0 - band) - slack &&
                  um.values[j] <= ef.values[j] * (1.0 + band) + slack;
      }
      lamM.push_back(um.values);
    }
    bool conv = true;
    double worst = 0.0;
    for (int j = 0; j < 3; ++j) {
      double target = std::sqrt(2.0) * (2 * j + 1);
      double e_first = std::abs(lamM[0][j] - target);
      double e_last = std::abs(lamM[2][j] - target);
      conv = conv && e_last <= e_first && e_last <= 0.1 * target;
      worst = std::max(worst, e_last / target);
    }
    d = "final relative error " + std::to_string(worst);
    return bracket && conv;
  });

  criterion(7, "perturbation expansion of the weighted transverse problem",
            [](std::string& d) {
    bool d0 = std::abs(delta_coefficient(0.0) - 0.5) < 1e-10;
    std::vector<double> eps = {0.1, 0.05, 0.025};
    PerturbationCoeffs pc = perturbation_coeffs(eps);
    std::vector<double> res;
    for (double r : pc.residual) res.push_back(std::abs(r));
    double slope = fit_exponent(eps, res);
    d = "delta(0) residual " +
        std::to_string(std::abs(delta_coefficient(0.0) - 0.5)) +
        ", residual exponent " + std::to_string(slope);
    return d0 && slope >= 1.8;
  });

  criterion(8, "eigenvalue count grows as the strip thins", [](std::string& d) {
    MollifiedFamily mf = make_square_twist_family(0.25, 10.0);
    CountResult a = count_below_threshold(0.1, mf);
    CountResult b = count_below_threshold(0.05, mf);
    CountResult c = count_below_threshold(0.025, mf);
    d = "N = " + std::to_string(a.N) + ", " + std::to_string(b.N) + ", " +
        std::to_string(c.N);
    return a.N >= 1 && a.N < b.N && b.N < c.N;
  });

  criterion(9, "solver oracles", [](std::string& d) {
    TridiagSystem sys;
    sys.diag = {2.0, 2.0, 2.0};
    sys.offdiag = {-1.0, -1.0};
    EigResult tr = eig_tridiag(sys, 3);
    double r2 = std::sqrt(2.0);
    bool tri_ok = std::abs(tr.values[0] - (2.0 - r2)) < 1e-12 &&
                  std::abs(tr.values[1] - 2.0) < 1e-12 &&
                  std::abs(tr.values[2] - (2.0 + r2)) < 1e-12;

    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> size(30, 200);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      int n = size(rng);
      Eigen::MatrixXd R(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) R(i, j) = u(rng);
      Eigen::MatrixXd M = R.transpose() * R + Eigen::MatrixXd::Identity(n, n);
      SparseSym A;
      A.n = n;
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) A.add(i, j, M(i, j));
      EigResult sp = eig_sparse_lowest(A, nullptr, 3, 1e-9, 100 + trial);
      auto oracle = testing::dense_eigs(A, 3);
      for (int j = 0; j < 3; ++j)
        worst = std::max(worst, std::abs(sp.values[j] - oracle[j]));
    }
    d = "sparse-vs-dense max deviation " + std::to_string(worst);
    return tri_ok && worst < 1e-8;
  });

  criterion(10, "geometry invariants", [](std::string& d) {
    CurveSpec c = straight_curve(2);
    c.curvatures[0] = [](double) { return 1.0; };
    FramePath fp = integrate_frame(c, {0.0, 2.0 * kPi}, 0.01);
    double gram = fp.gram_deviation();
    double closure = (fp.gamma.back() - fp.gamma.front()).norm();

    TwistProfile tp = make_constant_twist(1.0);
    FramePath straight = integrate_frame(straight_curve(2), {-3.0, 3.0}, 0.05);
    SurfaceMesh m1 = immersion_sample(straight, tp, 0.2, 9, 1);
    SurfaceMesh m2 = immersion_sample(fp, tp, 0.1, 7, 4);
    d = "gram " + std::to_string(gram) + ", closure " + std::to_string(closure);
    return gram <= 1e-8 && closure <= 1e-6 && m1.min_det_jacobian() > 0 &&
           m2.min_det_jacobian() > 0;
  });

  if (g_failures == 0) std::printf("all acceptance criteria passed\n");
  return g_failures == 0 ? 0 : 1;
}
