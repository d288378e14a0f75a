// twistband command-line front door: batch runs over the fiber bands, the 2D
// strip spectrum, variational certificates, the thin-strip limit, frame
// transport and surface export. Every run writes a manifest with content
// digests of its outputs.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "twistband/certificates.hpp"
#include "twistband/common.hpp"
#include "twistband/fiber.hpp"
#include "twistband/frame.hpp"
#include "twistband/io.hpp"
#include "twistband/strip.hpp"
#include "twistband/thin_limit.hpp"
#include "twistband/twist_profile.hpp"

namespace tb = twistband;
namespace fs = std::filesystem;

namespace {

int default_jobs() {
  if (const char* env = std::getenv("TWISTBAND_JOBS")) {
    try {
      int j = std::stoi(env);
      if (j >= 1) return j;
    } catch (const std::exception&) {
    }
    throw tb::config_error("TWISTBAND_JOBS must be a positive integer");
  }
  return 1;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
  }
};

struct Emitter {
  fs::path out;
  tb::RunManifest manifest;

  explicit Emitter(const std::string& dir, const std::string& command) {
    out = dir;
    fs::create_directories(out);
    manifest.command = command;
  }
  void file(const std::string& name, const std::string& bytes) {
    tb::write_file(out / name, bytes);
    manifest.record_output(name, bytes);
  }
  void finish(double total_ms) {
    manifest.timings["total"] = total_ms;
    tb::write_file(out / "manifest.json", manifest.json().dump(2) + "\n");
  }
};

tb::SlowdownBeta preset_beta(const std::string& preset, double gamma,
                             double height) {
  if (preset == "triangle") return tb::beta_triangle(gamma, height, 1.0);
  if (preset == "signed")
    return tb::beta_two_triangle(gamma, height,
                                 height * tb::signed_balanced_depth(), 2.0);
  if (preset == "zero") return tb::beta_zero(gamma, 1.0);
  throw tb::config_error("unknown preset '" + preset +
                         "' (expected triangle, signed or zero)");
}

tb::MollifiedFamily named_family(const std::string& name, double a, double K,
                                 double gamma) {
  if (name == "square") return tb::make_square_twist_family(a, K);
  if (name == "constant") return tb::make_constant_family(gamma);
  throw tb::config_error("unknown family '" + name +
                         "' (expected square or constant)");
}

// ---------------------------------------------------------------- bands

int cmd_bands(double eps, double gamma, int nmax, double pmax, int pcount,
              int m, int jobs, const std::string& outdir) {
  Timer timer;
  Emitter em(outdir, "bands");
  em.manifest.config = {{"eps", eps},     {"gamma", gamma}, {"nmax", nmax},
                        {"pmax", pmax},   {"pcount", pcount}, {"m", m},
                        {"jobs", jobs}};

  std::vector<double> grid;
  if (pmax > 0) {
    for (int i = 0; i < pcount; ++i)
      grid.push_back(-pmax + 2.0 * pmax * i / (pcount - 1));
  } else {
    grid = tb::default_p_grid(eps, gamma, pcount);
  }
  tb::BandTable tab = tb::band_table(eps, gamma, grid, nmax, m, jobs);

  std::vector<std::string> header{"p"};
  for (int n = 1; n <= nmax; ++n) header.push_back("lambda_" + std::to_string(n));
  tb::CsvWriter csv(header);
  std::ostringstream dat;
  dat.precision(16);
  dat << std::scientific;
  for (std::size_t ip = 0; ip < grid.size(); ++ip) {
    csv.cell(grid[ip]);
    dat << grid[ip];
    for (int n = 0; n < nmax; ++n) {
      csv.cell(tab.bands[n][ip]);
      dat << " " << tab.bands[n][ip];
    }
    dat << "\n";
  }
  em.file("bands.csv", csv.str());
  em.file("bands.dat", dat.str());

  nlohmann::json thr;
  if (gamma > 0 && eps < tb::positivity_window(gamma)) {
    tb::GroundState gs = tb::threshold(eps, gamma, m);
    thr["lambda1_0"] = gs.lambda1_0;
    thr["err_estimate"] = gs.err_estimate;
  } else {
    // untwisted (or outside the positivity window): report the p = 0 band
    tb::FiberProblem fp{eps, gamma, 0.0, m};
    tb::FiberSolveResult r = tb::solve_fiber(fp, 1);
    thr["lambda1_0"] = r.values[0];
    thr["err_estimate"] = r.err_estimate[0];
    if (gamma > 0) em.manifest.warnings.push_back("outside positivity window");
  }
  thr["eps"] = eps;
  thr["gamma"] = gamma;
  em.file("threshold.json", thr.dump(2) + "\n");
  em.finish(timer.ms());
  return 0;
}

// ------------------------------------------------------------ spectrum2d

int cmd_spectrum2d(double eps, double gamma, const std::string& preset,
                   double height, double L, int ns, int nt, int k,
                   std::uint64_t seed, const std::string& outdir) {
  Timer timer;
  Emitter em(outdir, "spectrum2d");
  em.manifest.config = {{"eps", eps},   {"gamma", gamma}, {"preset", preset},
                        {"height", height}, {"L", L},     {"ns", ns},
                        {"nt", nt},     {"k", k},         {"seed", seed}};

  tb::SlowdownBeta sb = preset_beta(preset, gamma, height);
  tb::StripDiscretization sd;
  sd.eps = eps;
  sd.profile = tb::make_twist_from_beta(sb);
  sd.L = L;
  sd.ns = ns;
  sd.nt = nt;
  sd.validate();

  double thr_grid = tb::threshold_on_grid(eps, gamma, nt);
  double margin = tb::estimate_truncation_margin(eps, gamma, L, ns, nt, seed);
  tb::SparseSym A = tb::assemble_c(sd);
  tb::SpectrumResult sr = tb::solve_strip(A, k, thr_grid, margin, seed);

  tb::CsvWriter csv({"j", "lambda", "below_threshold"});
  for (int j = 0; j < k; ++j) {
    bool below = std::find(sr.below_threshold.begin(), sr.below_threshold.end(),
                           j) != sr.below_threshold.end();
    csv.cell(j + 1).cell(sr.eigenvalues[j]).cell(below ? 1 : 0);
  }
  em.file("spectrum.csv", csv.str());

  nlohmann::json js;
  js["threshold_grid"] = thr_grid;
  js["threshold_extrapolated"] = tb::threshold(eps, gamma).lambda1_0;
  js["truncation_margin"] = margin;
  js["below_threshold_count"] = sr.below_threshold.size();
  em.file("spectrum.json", js.dump(2) + "\n");
  em.manifest.fitted["truncation_margin"] = margin;
  em.finish(timer.ms());
  return 0;
}

// --------------------------------------------------------------- certify

int cmd_certify(const std::string& preset, double gamma, double height,
                const std::vector<double>& deltas,
                const std::vector<double>& epses, int fiber_m, int jobs,
                bool cross_check, double L, int ns, int nt, std::uint64_t seed,
                const std::string& outdir) {
  Timer timer;
  Emitter em(outdir, "certify");
  em.manifest.config = {{"preset", preset}, {"gamma", gamma},
                        {"height", height}, {"deltas", deltas},
                        {"eps", epses},     {"fiber_m", fiber_m},
                        {"jobs", jobs},     {"cross_check", cross_check}};

  tb::SlowdownBeta sb = preset_beta(preset, gamma, height);
  tb::TrialKind kind = (preset == "signed") ? tb::TrialKind::PsiDeltaEta
                                              : tb::TrialKind::PsiDelta;
  std::vector<tb::SweepRow> rows =
      tb::certificate_sweep(sb, deltas, epses, kind, fiber_m, jobs);

  tb::CsvWriter csv({"delta", "eta", "eps", "gap", "norm2", "normalized_gap",
                     "limit_raw", "limit_normalized", "quad_error", "error"});
  int negatives = 0;
  std::size_t failed = 0;
  for (const auto& r : rows) {
    csv.cell(r.delta).cell(r.eta).cell(r.eps);
    csv.cell(r.cert.gap).cell(r.cert.norm2).cell(r.cert.normalized_gap);
    csv.cell(r.cert.limit_raw).cell(r.cert.limit_normalized);
    csv.cell(r.cert.quad_error).cell(r.error);
    if (r.error.empty() && r.cert.gap < 0) ++negatives;
    if (!r.error.empty()) ++failed;
  }
  tb::check_numeric(failed < rows.size(),
                    "certify: every sweep cell failed; first error: " +
                        rows.front().error);
  em.file("certify.csv", csv.str());
  em.manifest.fitted["negative_gap_rows"] = negatives;

  if (cross_check) {
    double eps = *std::min_element(epses.begin(), epses.end());
    tb::StripDiscretization sd;
    sd.eps = eps;
    sd.profile = tb::make_twist_from_beta(sb);
    sd.L = L;
    sd.ns = ns;
    sd.nt = nt;
    sd.validate();
    double thr = tb::threshold_on_grid(eps, gamma, nt);
    double margin = tb::estimate_truncation_margin(eps, gamma, L, ns, nt, seed);
    tb::SpectrumResult sr =
        tb::solve_strip(tb::assemble_c(sd), 3, thr, margin, seed);
    tb::CsvWriter cc({"j", "lambda", "threshold_grid", "margin",
                      "below_threshold"});
    for (int j = 0; j < 3; ++j) {
      bool below = std::find(sr.below_threshold.begin(),
                             sr.below_threshold.end(),
                             j) != sr.below_threshold.end();
      cc.cell(j + 1).cell(sr.eigenvalues[j]).cell(thr).cell(margin).cell(
          below ? 1 : 0);
    }
    em.file("cross_check.csv", cc.str());
  }
  em.finish(timer.ms());
  return 0;
}

// ------------------------------------------------------------------ thin

int cmd_thin(const std::string& family, double a, double K, double gamma,
             const std::vector<double>& epses, int k, bool check_conditions,
             int jobs, const std::string& outdir) {
  Timer timer;
  Emitter em(outdir, "thin");
  em.manifest.config = {{"family", family}, {"a", a},       {"K", K},
                        {"gamma", gamma},   {"eps", epses}, {"k", k},
                        {"jobs", jobs}};

  tb::MollifiedFamily mf = named_family(family, a, K, gamma);

  struct PerEps {
    tb::CountResult count;
    tb::SandwichReport sandwich;
    std::string error;
  };
  std::vector<PerEps> results(epses.size());
  tb::parallel_for(epses.size(), jobs, [&](std::size_t i) {
    try {
      results[i].count = tb::count_below_threshold(epses[i], mf);
      results[i].sandwich = tb::sandwich_check(epses[i], mf, k);
    } catch (const std::exception& ex) {
      results[i].error = ex.what();
    }
  });
  for (std::size_t i = 0; i < epses.size(); ++i)
    tb::check_numeric(results[i].error.empty(),
                      "thin study failed at eps = " +
                          tb::format_double(epses[i]) + ": " +
                          results[i].error);

  tb::CsvWriter counts({"eps", "N", "gap", "gamma_eps"});
  for (std::size_t i = 0; i < epses.size(); ++i)
    counts.cell(epses[i])
        .cell(results[i].count.N)
        .cell(results[i].count.gap)
        .cell(results[i].count.gamma_eps);
  em.file("counts.csv", counts.str());

  tb::CsvWriter sw({"eps", "j", "lambda_eff", "lambda_M",
                    "lambda_2d_minus_box", "gap", "N"});
  for (std::size_t i = 0; i < epses.size(); ++i)
    for (const auto& row : results[i].sandwich.rows)
      sw.cell(epses[i])
          .cell(row.j)
          .cell(row.lambda_eff)
          .cell(row.lambda_M)
          .cell(row.lambda_2d_minus_box)
          .cell(results[i].count.gap)
          .cell(results[i].count.N);
  em.file("sandwich.csv", sw.str());

  tb::PerturbationCoeffs pc = tb::perturbation_coeffs(epses);
  tb::CsvWriter co({"eps", "Sigma", "delta", "residual"});
  for (std::size_t i = 0; i < epses.size(); ++i)
    co.cell(pc.eps_list[i]).cell(pc.Sigma[i]).cell(pc.delta[i]).cell(
        pc.residual[i]);
  em.file("coeffs.csv", co.str());
  em.manifest.fitted["residual_C"] = pc.fitted_C;
  for (std::size_t i = 0; i < epses.size(); ++i) {
    em.manifest.fitted["K_upper_eps" + std::to_string(i)] =
        results[i].sandwich.K_upper;
    em.manifest.fitted["K_lemma_eps" + std::to_string(i)] =
        results[i].sandwich.K_lemma;
  }
  em.manifest.warnings.push_back(
      "spectral gap approximated by the constant-tail transverse threshold");

  if (check_conditions) {
    std::vector<double> samples;
    double smax = 4.0 * mf.nu2(*std::min_element(epses.begin(), epses.end()));
    for (int i = 0; i <= 400; ++i)
      samples.push_back(-smax + 2.0 * smax * i / 400.0);
    tb::FamilyReport rep = tb::validate_family(mf, epses, samples);
    tb::CsvWriter cv({"eps", "condition", "passed", "violation_s", "detail"});
    for (const auto& er : rep.per_eps)
      for (const auto& cc : er.conditions)
        cv.cell(er.eps).cell(cc.id).cell(cc.passed ? 1 : 0)
            .cell(cc.violation_s).cell(cc.detail);
    em.file("conditions.csv", cv.str());
    em.manifest.fitted["min_K"] = rep.min_K;
  }
  em.finish(timer.ms());
  return 0;
}

// ------------------------------------------------------- validate-family

int cmd_validate_family(const std::string& family, double a, double K,
                        double gamma, const std::vector<double>& epses,
                        double smax, int samples_n,
                        const std::string& outdir) {
  Timer timer;
  Emitter em(outdir, "validate-family");
  em.manifest.config = {{"family", family}, {"a", a},
                        {"K", K},           {"gamma", gamma},
                        {"eps", epses},     {"smax", smax},
                        {"samples", samples_n}};
  tb::MollifiedFamily mf = named_family(family, a, K, gamma);
  std::vector<double> samples;
  for (int i = 0; i <= samples_n; ++i)
    samples.push_back(-smax + 2.0 * smax * i / samples_n);
  tb::FamilyReport rep = tb::validate_family(mf, epses, samples);

  tb::CsvWriter cv({"eps", "condition", "passed", "violation_s", "detail"});
  for (const auto& er : rep.per_eps)
    for (const auto& cc : er.conditions)
      cv.cell(er.eps).cell(cc.id).cell(cc.passed ? 1 : 0).cell(cc.violation_s)
          .cell(cc.detail);
  em.file("conditions.csv", cv.str());

  nlohmann::json js;
  js["all_passed"] = rep.all_passed;
  js["min_K"] = rep.min_K;
  for (const auto& er : rep.per_eps) {
    nlohmann::json e;
    e["eps"] = er.eps;
    e["nu1"] = er.nu1;
    e["nu2"] = er.nu2;
    e["min_K"] = er.min_K;
    js["per_eps"].push_back(e);
  }
  em.file("family.json", js.dump(2) + "\n");
  em.manifest.fitted["min_K"] = rep.min_K;
  em.finish(timer.ms());
  return 0;
}

// ----------------------------------------------------------------- frame

int cmd_frame(int n, double kappa, double smin, double smax, double step,
              const std::string& outdir) {
  Timer timer;
  Emitter em(outdir, "frame");
  em.manifest.config = {{"n", n},       {"kappa", kappa}, {"smin", smin},
                        {"smax", smax}, {"step", step}};
  tb::CurveSpec curve = tb::straight_curve(n);
  if (kappa != 0.0)
    curve.curvatures[0] = [kappa](double) { return kappa; };
  tb::FramePath fp = tb::integrate_frame(curve, {smin, smax}, step);

  std::vector<std::string> header{"s"};
  for (int i = 0; i <= n; ++i) header.push_back("g" + std::to_string(i + 1));
  for (int r = 0; r <= n; ++r)
    for (int ci = 0; ci <= n; ++ci)
      header.push_back("F" + std::to_string(r + 1) + std::to_string(ci + 1));
  tb::CsvWriter csv(header);
  for (std::size_t i = 0; i < fp.s.size(); ++i) {
    csv.cell(fp.s[i]);
    for (int ci = 0; ci <= n; ++ci) csv.cell(fp.gamma[i][ci]);
    for (int r = 0; r <= n; ++r)
      for (int ci = 0; ci <= n; ++ci) csv.cell(fp.frames[i](r, ci));
  }
  em.file("frame.csv", csv.str());

  nlohmann::json js;
  js["gram_deviation"] = fp.gram_deviation();
  js["arclength_deviation"] = fp.arclength_deviation();
  if (kappa != 0.0) {
    double period = 2.0 * 2.0 * tb::half_pi() / std::abs(kappa);
    js["circle_period"] = period;
    if (smax - smin >= period) {
      // closure error after one full turn
      double best = 1e300;
      for (std::size_t i = 0; i < fp.s.size(); ++i)
        if (std::abs(fp.s[i] - smin - period) < step)
          best = std::min(best, (fp.gamma[i] - fp.gamma.front()).norm());
      js["closure_error"] = best;
    }
  }
  em.file("frame.json", js.dump(2) + "\n");
  em.finish(timer.ms());
  return 0;
}

// -------------------------------------------------------- export-surface

int cmd_export_surface(double eps, const std::string& profile, double gamma,
                       double kappa, double smin, double smax, double step,
                       int nt, const std::string& outdir) {
  Timer timer;
  Emitter em(outdir, "export-surface");
  em.manifest.config = {{"eps", eps},   {"profile", profile}, {"gamma", gamma},
                        {"kappa", kappa}, {"smin", smin},     {"smax", smax},
                        {"step", step}, {"nt", nt}};
  tb::TwistProfile tp;
  if (profile == "constant")
    tp = tb::make_constant_twist(gamma);
  else if (profile == "square")
    tp = tb::make_square_twist();
  else
    throw tb::config_error("unknown profile '" + profile +
                           "' (expected constant or square)");
  tb::CurveSpec curve = tb::straight_curve(tp.dim);
  if (kappa != 0.0)
    curve.curvatures[0] = [kappa](double) { return kappa; };
  tb::FramePath fp = tb::integrate_frame(curve, {smin, smax}, step);
  tb::SurfaceMesh mesh = tb::immersion_sample(fp, tp, eps, nt);

  std::ostringstream obj, csv;
  mesh.write_obj(obj);
  mesh.write_csv(csv);
  em.file("surface.obj", obj.str());
  em.file("surface.csv", csv.str());

  nlohmann::json js;
  js["min_det_jacobian"] = mesh.min_det_jacobian();
  js["vertices"] = mesh.vertices.size();
  js["faces"] = mesh.faces.size();
  em.file("surface.json", js.dump(2) + "\n");
  em.finish(timer.ms());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"twistband: spectral toolkit for thin twisted strips"};
  app.require_subcommand(1);

  int jobs = 0;  // resolved against TWISTBAND_JOBS after parsing
  app.add_option("--jobs", jobs, "worker threads (default: TWISTBAND_JOBS or 1)");

  std::string outdir = ".";
  app.add_option("--out", outdir, "output directory")->capture_default_str();

  // bands
  auto* bands = app.add_subcommand("bands", "fiber band functions over p");
  double b_eps = 0, b_gamma = 0, b_pmax = 0;
  int b_nmax = 3, b_pcount = 129, b_m = 512;
  bands->add_option("--eps", b_eps, "strip half-width eps")->required();
  bands->add_option("--gamma", b_gamma, "constant twist rate")->required();
  bands->add_option("--nmax", b_nmax, "number of bands");
  bands->add_option("--pmax", b_pmax, "half-width of the p grid (0 = auto)");
  bands->add_option("--pcount", b_pcount, "p grid points");
  bands->add_option("--m", b_m, "interior t nodes");

  // spectrum2d
  auto* sp2 = app.add_subcommand("spectrum2d", "2D strip spectrum");
  double s_eps = 0, s_gamma = 1, s_height = 1, s_L = 40;
  int s_ns = 960, s_nt = 64, s_k = 5;
  std::uint64_t s_seed = 7;
  std::string s_preset = "triangle";
  sp2->add_option("--eps", s_eps, "strip half-width eps")->required();
  sp2->add_option("--gamma", s_gamma, "asymptotic twist rate");
  sp2->add_option("--preset", s_preset, "beta preset: triangle|signed|zero");
  sp2->add_option("--height", s_height, "beta peak height");
  sp2->add_option("--L", s_L, "s truncation half-length");
  sp2->add_option("--ns", s_ns, "interior s nodes");
  sp2->add_option("--nt", s_nt, "interior t nodes");
  sp2->add_option("--k", s_k, "eigenvalues to compute");
  sp2->add_option("--seed", s_seed, "Lanczos start seed");

  // certify
  auto* cert = app.add_subcommand("certify", "variational certificate sweep");
  std::string c_preset = "triangle", c_deltas = "0.02,0.04,0.08,0.16";
  std::string c_epses = "0.08,0.04,0.02";
  double c_gamma = 1, c_height = 1, c_L = 40;
  int c_m = 512, c_ns = 960, c_nt = 64;
  std::uint64_t c_seed = 7;
  bool c_cross = false;
  cert->add_option("--preset", c_preset, "beta preset: triangle|signed|zero");
  cert->add_option("--gamma", c_gamma, "asymptotic twist rate");
  cert->add_option("--height", c_height, "beta peak height");
  cert->add_option("--deltas", c_deltas, "comma-separated delta grid");
  cert->add_option("--eps", c_epses, "comma-separated eps grid");
  cert->add_option("--m", c_m, "interior t nodes for the fiber solve");
  cert->add_flag("--cross-check", c_cross, "also solve the 2D spectrum");
  cert->add_option("--L", c_L, "2D truncation half-length");
  cert->add_option("--ns", c_ns, "2D interior s nodes");
  cert->add_option("--nt", c_nt, "2D interior t nodes");
  cert->add_option("--seed", c_seed, "Lanczos start seed");

  // thin
  auto* thin = app.add_subcommand("thin", "thin-strip limit study");
  std::string t_family = "square", t_epses = "0.1,0.05,0.025";
  double t_a = 0.25, t_K = 10.0, t_gamma = 1.0;
  int t_k = 3;
  bool t_check = false;
  thin->add_option("--family", t_family, "family: square|constant");
  thin->add_option("--a", t_a, "mollification exponent a");
  thin->add_option("--K", t_K, "declared bound constant K");
  thin->add_option("--gamma", t_gamma, "rate for the constant family");
  thin->add_option("--eps", t_epses, "comma-separated eps grid");
  thin->add_option("--k", t_k, "eigenvalues per eps");
  thin->add_flag("--check-conditions", t_check, "emit the condition table");

  // validate-family
  auto* vf = app.add_subcommand("validate-family", "condition validator");
  std::string v_family = "square", v_epses = "0.1,0.05,0.025";
  double v_a = 0.25, v_K = 10.0, v_gamma = 1.0, v_smax = 20.0;
  int v_samples = 400;
  vf->add_option("--family", v_family, "family: square|constant");
  vf->add_option("--a", v_a, "mollification exponent a");
  vf->add_option("--K", v_K, "declared bound constant K");
  vf->add_option("--gamma", v_gamma, "rate for the constant family");
  vf->add_option("--eps", v_epses, "comma-separated eps grid");
  vf->add_option("--smax", v_smax, "sample half-range");
  vf->add_option("--samples", v_samples, "sample count");

  // frame
  auto* fr = app.add_subcommand("frame", "transport a relatively parallel frame");
  int f_n = 2;
  double f_kappa = 0, f_smin = 0, f_smax = 10, f_step = 0.01;
  fr->add_option("--n", f_n, "number of normal fields");
  fr->add_option("--kappa", f_kappa, "constant curvature (first normal)");
  fr->add_option("--smin", f_smin, "start arclength");
  fr->add_option("--smax", f_smax, "end arclength");
  fr->add_option("--step", f_step, "RK4 step");

  // export-surface
  auto* ex = app.add_subcommand("export-surface", "sample the immersed strip");
  double e_eps = 0.1, e_gamma = 1.0, e_kappa = 0, e_smin = -5, e_smax = 5,
         e_step = 0.05;
  int e_nt = 9;
  std::string e_profile = "constant";
  ex->add_option("--eps", e_eps, "strip half-width eps");
  ex->add_option("--profile", e_profile, "twist profile: constant|square");
  ex->add_option("--gamma", e_gamma, "constant twist rate");
  ex->add_option("--kappa", e_kappa, "constant curvature (first normal)");
  ex->add_option("--smin", e_smin, "start arclength");
  ex->add_option("--smax", e_smax, "end arclength");
  ex->add_option("--step", e_step, "frame step");
  ex->add_option("--nt", e_nt, "t samples per section");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (jobs == 0) jobs = default_jobs();
    tb::require(jobs >= 1, "--jobs must be positive");
    if (*bands)
      return cmd_bands(b_eps, b_gamma, b_nmax, b_pmax, b_pcount, b_m, jobs,
                       outdir);
    if (*sp2)
      return cmd_spectrum2d(s_eps, s_gamma, s_preset, s_height, s_L, s_ns,
                            s_nt, s_k, s_seed, outdir);
    if (*cert)
      return cmd_certify(c_preset, c_gamma, c_height,
                         tb::parse_double_list(c_deltas),
                         tb::parse_double_list(c_epses), c_m, jobs, c_cross,
                         c_L, c_ns, c_nt, c_seed, outdir);
    if (*thin)
      return cmd_thin(t_family, t_a, t_K, t_gamma,
                      tb::parse_double_list(t_epses), t_k, t_check, jobs,
                      outdir);
    if (*vf)
      return cmd_validate_family(v_family, v_a, v_K, v_gamma,
                                 tb::parse_double_list(v_epses), v_smax,
                                 v_samples, outdir);
    if (*fr) return cmd_frame(f_n, f_kappa, f_smin, f_smax, f_step, outdir);
    if (*ex)
      return cmd_export_surface(e_eps, e_profile, e_gamma, e_kappa, e_smin,
                                e_smax, e_step, e_nt, outdir);
    throw tb::config_error("no subcommand given");
  } catch (const tb::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const tb::numeric_error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  }
}
