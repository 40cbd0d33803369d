// Acceptance suite: runs every advertised criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code 0 iff all pass.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cpsys/experiments.hpp"
#include "cpsys/fixtures.hpp"
#include "cpsys/gauduchon.hpp"
#include "cpsys/radon.hpp"
#include "cpsys/serialization.hpp"
#include "cpsys/variation.hpp"

using namespace cpsys;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, const std::string& what, bool pass, double secs, const std::string& detail) {
  std::printf("[%s] criterion %2d: %-34s (%6.2fs) %s\n", pass ? "PASS" : "FAIL", id, what.c_str(),
              secs, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

template <class F>
void criterion(int id, const std::string& what, F&& body) {
  auto t0 = Clock::now();
  bool pass = false;
  std::string detail;
  try {
    auto r = body();
    pass = r.first;
    detail = r.second;
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  report(id, what, pass, secs, detail);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<QForm> random_horizontal(int n, int d, int count, uint64_t seed) {
  DirectionSpace ds = DirectionSpace::create(n, d);
  std::vector<QForm> imgs;
  for (int r = 0; r < ds.dim(); ++r) imgs.push_back(ds.basis_form(r).euler_contraction(false));
  QMat horiz = nullspace(linearize_images(imgs));
  std::mt19937_64 rng(seed);
  std::vector<QForm> out;
  while (int(out.size()) < count) {
    auto x = std::vector<mpq_class>(size_t(horiz.cols));
    for (auto& v : x) {
      v = mpq_class(long(rng() % 7) - 3, 1 + long(rng() % 3));
      v.canonicalize();
    }
    QForm f = ds.materialize(horiz.apply(x));
    if (!f.reduced().is_zero()) out.push_back(std::move(f));
  }
  return out;
}

}  // namespace

int main() {
  std::printf("acceptance suite: exact Radon/systole engine on CP^n\n");

  criterion(1, "normalization exactness", [] {
    bool ok = true;
    for (int n = 2; n <= 3; ++n) {
      ok = ok && QForm::fubini_study(n).wedge_pow(n).integrate_cpn() == 1;
      mpq_class vol = fubini_study_metric(n).volume_exact();
      mpq_class want(1);
      want /= factorial_z(unsigned(n));
      ok = ok && vol == want;
    }
    return std::make_pair(ok, std::string("integrate(fs^n) == 1 and vol == 1/n! exactly, n = 2,3"));
  });

  criterion(2, "rho at the Fubini-Study metric", [] {
    double r2 = fubini_study_metric(2).rho();
    double r3 = fubini_study_metric(3).rho();
    double e2 = std::abs(r2 - std::sqrt(2.0));
    double e3 = std::abs(r3 - std::pow(6.0, 2.0 / 3.0) / 2.0);
    char buf[128];
    std::snprintf(buf, sizeof buf, "|err| = %.2e (n=2), %.2e (n=3), tol 1e-12", e2, e3);
    return std::make_pair(e2 <= 1e-12 && e3 <= 1e-12, std::string(buf));
  });

  criterion(3, "integral geometric formula", [] {
    auto dirs = random_horizontal(2, 2, 20, 1001);
    bool exact = true;
    double worst = 0;
    for (const auto& xi : dirs) {
      if (igf_check(xi).residual != 0) exact = false;
      worst = std::max(worst, std::abs(igf_check_float(xi.to_float())));
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "20 random xi: exact residuals all 0 = %d, float worst %.2e",
                  int(exact), worst);
    return std::make_pair(exact && worst <= 1e-10, std::string(buf));
  });

  criterion(4, "radon kernel and injectivity", [] {
    std::vector<ProjPoint<GaussRat>> sigmas = {
        basis_point(3, 0), basis_point(3, 1), basis_point(3, 2),
        unit_point(std::vector<GaussRat>{GaussRat(mpq_class(3, 5)), GaussRat(mpq_class(4, 5)),
                                         GaussRat(0)}),
        unit_point(std::vector<GaussRat>{GaussRat(mpq_class(1, 3)), GaussRat(mpq_class(2, 3)),
                                         GaussRat(mpq_class(2, 3))})};
    std::mt19937_64 rng(77);
    auto fbasis1 = real_function_basis(2, 1);
    auto fbasis2 = real_function_basis(2, 2);
    bool kernel_ok = true;
    for (int t = 0; t < 20; ++t) {
      const auto& basis = (t % 2 == 0) ? fbasis1 : fbasis2;
      QForm lambda = QForm::zero(3, 0);
      for (const auto& b : basis) {
        long c = long(rng() % 5) - 2;
        if (c != 0) lambda += b.scaled(GaussRat(c));
      }
      if (lambda.reduced().is_zero()) lambda = basis[1];
      QForm xi = lambda.dc().exterior_d();
      for (const auto& s : sigmas)
        if (zero_avg_radon(xi, s) != 0) kernel_ok = false;
    }
    double min_sv = 1e300;
    for (int d = 1; d <= 2; ++d) min_sv = std::min(min_sv, radon_injectivity(2, d).min_singular_value);
    char buf[128];
    std::snprintf(buf, sizeof buf, "dd^c kernel exact = %d, min singular value %.3e > 1e-6",
                  int(kernel_ok), min_sv);
    return std::make_pair(kernel_ok && min_sv > 1e-6, std::string(buf));
  });

  criterion(5, "theorem D at fixture scale", [] {
    auto sigmas = sample_sigma(2, 200, 555);
    bool ok = true;
    std::string note;
    for (const auto& fx : standard_fixtures(2)) {
      double mean = 0, var = 0, lo = 1e300, hi = 0;
      std::vector<double> areas;
      for (const auto& s : sigmas) areas.push_back(fx.metric.area_equator(s));
      for (double a : areas) mean += a;
      mean /= double(areas.size());
      for (double a : areas) {
        var += (a - mean) * (a - mean);
        lo = std::min(lo, a);
        hi = std::max(hi, a);
      }
      var /= double(areas.size());
      if (fx.metric.is_gauduchon()) {
        if (var > 1e-20 * mean * mean) {
          ok = false;
          note += fx.name + " variance too large; ";
        }
      } else if ((hi - lo) / mean < 1e-6) {
        ok = false;
        note += fx.name + " lacks a witness pair; ";
      }
    }
    if (note.empty()) note = "Gauduchon variance <= 1e-20 mean^2; non-Gauduchon witness >= 1e-6";
    return std::make_pair(ok, note);
  });

  criterion(6, "first variational formula", [] {
    HermitianMetric gfs = fubini_study_metric(2);
    TangentBasis gb = gauduchon_tangent_basis(2, 2);
    auto sig_q = unit_point(std::vector<GaussRat>{GaussRat(mpq_class(3, 5)),
                                                  GaussRat(mpq_class(4, 5)), GaussRat(0)});
    bool zeros_exact = true;
    for (const auto& dir : gb.directions)
      if (first_variation_m_sigma(gfs, dir.eta, sig_q).bracket != 0) zeros_exact = false;
    // 20 (metric, direction, sigma) fixtures against the fd oracle
    auto dirs = random_horizontal(2, 1, 5, 606);
    auto sigmas = sample_sigma(2, 2, 17);
    std::vector<HermitianMetric> metrics;
    metrics.push_back(fubini_study_metric(2));
    metrics.push_back(conformal_metric(2, mpq_class(1, 10)));
    double worst = 0;
    int count = 0;
    for (const auto& g : metrics)
      for (const auto& eta : dirs)
        for (const auto& s : sigmas) {
          MetricPath path(g.omega(), eta);
          double analytic = first_variation_m_sigma(g, eta, s);
          double fd = fd_oracle(path, PathFunctional::MSigma, 1, 1e-4, true, s);
          double scale = std::max({std::abs(analytic), std::abs(fd), 1e-8});
          worst = std::max(worst, std::abs(analytic - fd) / scale);
          ++count;
        }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "Gauduchon directions exactly critical = %d; fd match on %d fixtures, worst %.2e",
                  int(zeros_exact), count, worst);
    return std::make_pair(zeros_exact && worst <= 1e-6 && count >= 20, std::string(buf));
  });

  criterion(7, "first-order descent", [] {
    auto sigmas = sample_sigma(2, 200, 99);
    std::vector<QForm> dirs;
    dirs.push_back(QForm::fubini_study(2).scaled_by_function(
        QForm::Ratio{conformal_bump(2).components().begin()->second.num, 1}));
    for (auto& f : random_horizontal(2, 1, 3, 404))
      if (!f.dc().exterior_d().reduced().is_zero()) dirs.push_back(std::move(f));
    bool ok = true;
    double worst_margin = 1e300;
    for (const auto& eta : dirs) {
      FForm etaf = eta.to_float();
      bool pos = false, neg = false;
      for (const auto& s : sigmas) {
        double v = zero_avg_radon(etaf, s);
        pos = pos || v > 1e-12;
        neg = neg || v < -1e-12;
      }
      ok = ok && pos && neg;
      MetricPath path(QForm::fubini_study(2), eta);
      for (double t : {1e-2, -1e-2, 1e-3, -1e-3}) {
        double best = 1e300;
        for (const auto& s : sigmas) best = std::min(best, path.m_sigma_at(t, path.area_poly(s)));
        double margin = rho_fs(2) - best;
        worst_margin = std::min(worst_margin, margin);
        ok = ok && margin > 0;
      }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "%zu directions, all signed t below rho(fs); min margin %.3e",
                  dirs.size(), worst_margin);
    return std::make_pair(ok, std::string(buf));
  });

  criterion(8, "hessian spectrum and kernel", [] {
    HessianSpectrum hs = hessian_spectrum(2, 2);
    double lmax = 0;
    for (double l : hs.eigenvalues) lmax = std::max(lmax, std::abs(l));
    bool nonneg = true;
    for (double l : hs.eigenvalues) nonneg = nonneg && l >= -1e-9 * std::max(lmax, 1.0);
    bool kernel = hs.kernel_dim_exact == hs.kahler_dim && hs.kernel_dim_numeric == hs.kahler_dim;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "dim %d, kernel (exact) %d == Kahler dim %d, spectrum >= -1e-9 lmax: %d",
                  hs.basis_dim, hs.kernel_dim_exact, hs.kahler_dim, int(nonneg));
    return std::make_pair(nonneg && kernel, std::string(buf));
  });

  criterion(9, "theorem A quadratic growth", [] {
    const QForm& eta = gauduchon_nonkahler_direction();
    TangentBasis kb = kahler_tangent_basis(2, 2);
    FsPairing pairing(2);
    auto ed = pairing.analyze(eta);
    int m = kb.dim();
    auto rhs = std::vector<mpq_class>(size_t(m));
    for (int j = 0; j < m; ++j)
      rhs[size_t(j)] =
          pairing.l2_pair(ed, pairing.analyze(kb.directions[size_t(j)].eta), eta,
                          kb.directions[size_t(j)].eta);
    auto x = solve(kb.gram, rhs);
    if (!x) return std::make_pair(false, std::string("projection solve failed"));
    mpq_class perp2 = pairing.l2_pair(ed, ed, eta, eta);
    for (int j = 0; j < m; ++j) perp2 -= (*x)[size_t(j)] * rhs[size_t(j)];
    double target = 0.5 * std::sqrt(2.0) * perp2.get_d();
    MetricPath path(QForm::fubini_study(2), eta);
    if (!path.path_is_gauduchon())
      return std::make_pair(false, std::string("path is not Gauduchon"));
    auto area0 = path.area_poly(unit_point(make_e0(3)));
    double rho0 = path.m_sigma_at(0.0, area0);
    double worst = 0;
    for (double t : {1e-2, 5e-3, 2.5e-3}) {
      double est = (path.m_sigma_at(t, area0) - 2 * rho0 + path.m_sigma_at(-t, area0)) / (t * t) / 2;
      worst = std::max(worst, std::abs(est - target) / target);
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "coefficient vs (1/2)(n!)^{1/2}||eta_perp||^2: worst rel %.2e",
                  worst);
    return std::make_pair(worst <= 0.05, std::string(buf));
  });

  criterion(10, "gauduchon projection", [] {
    ProjectionResult fsp = gauduchon_projection(fubini_study_metric(2), 2);
    ProjectionResult gp = gauduchon_projection(gauduchon_only_metric(mpq_class(1, 64)), 2);
    auto is_const = [](const QForm& phi) {
      const auto& comp = phi.components().begin()->second;
      auto q = comp.num.div_norm_pow(comp.den_pow);
      return q.has_value() && q->adeg() == 0;
    };
    bool idem = is_const(fsp.phi_raw) && is_const(gp.phi_raw) &&
                fsp.report.weak_residual == 0 && gp.report.weak_residual == 0;
    ProjectionResult pr = gauduchon_projection(conformal_metric(2, mpq_class(1, 10)), 3);
    bool resid = pr.report.weak_residual <= 1e-8;
    std::vector<double> dist;
    for (const auto& e : {mpq_class(1, 10), mpq_class(1, 20), mpq_class(1, 40)})
      dist.push_back(gauduchon_projection(conformal_metric(2, e), 2).report.l2_dist_to_one);
    bool linear = std::abs(dist[0] / dist[1] - 2.0) <= 0.4 && std::abs(dist[1] / dist[2] - 2.0) <= 0.4;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "phi == 1 exact: %d; residual(d=3) %.2e <= 1e-8; eps-scaling ratios %.3f, %.3f",
                  int(idem), pr.report.weak_residual, dist[0] / dist[1], dist[1] / dist[2]);
    return std::make_pair(idem && resid && linear, std::string(buf));
  });

  criterion(11, "theorem E margins", [] {
    bool ok = true;
    double worst_a = 1e300, worst_b = 1e300;
    std::vector<HermitianMetric> family;
    family.push_back(fubini_study_metric(2));
    family.push_back(HermitianMetric::from_form(QForm::fubini_study(2).scaled(GaussRat(2)), 64, 2));
    family.push_back(conformal_metric(2, mpq_class(1, 10)));
    family.push_back(conformal_metric(2, mpq_class(1, 20)));
    family.push_back(conformal_metric(2, mpq_class(1, 40)));
    for (const auto& g : family) {
      TheoremEReport te = theorem_e_check(g, 3, 100, 31);
      ok = ok && te.inequality_a_holds && te.inequality_b_holds;
      worst_a = std::min(worst_a, te.margin_a);
      worst_b = std::min(worst_b, te.margin_b);
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "margins over the conformal family: min a = %.3e, min b = %.3e (tol -1e-10; "
                  "upper-bound semantics documented)",
                  worst_a, worst_b);
    return std::make_pair(ok, std::string(buf));
  });

  criterion(12, "determinism", [] {
    ExperimentConfig cfg;
    cfg.name = "local-min";
    cfg.n = 2;
    cfg.degree = 2;
    cfg.seed = 5;
    cfg.out_dir = "/tmp/cpsys_acc_det_a";
    if (run_experiment(cfg) != 0) return std::make_pair(false, std::string("run failed"));
    ExperimentConfig cfg2 = cfg;
    cfg2.out_dir = "/tmp/cpsys_acc_det_b";
    if (run_experiment(cfg2) != 0) return std::make_pair(false, std::string("run failed"));
    bool same = slurp("/tmp/cpsys_acc_det_a/local-min.csv") == slurp("/tmp/cpsys_acc_det_b/local-min.csv");
    return std::make_pair(same, std::string("repeated local-min runs byte-identical: ") +
                                    (same ? "yes" : "no"));
  });

  std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
