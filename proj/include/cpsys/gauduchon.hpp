#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "cpsys/hermitian.hpp"
#include "cpsys/linalg_exact.hpp"
#include "cpsys/radon.hpp"
#include "cpsys/variation.hpp"

namespace cpsys {

struct GalerkinReport {
  int degree = 0;
  int basis_dim = 0;
  int kernel_dim = 0;
  double weak_residual = 0;     // ||A phi||_2 of the solved weak system
  double defect = 0;            // coefficient norm of dd^c(omega-hat^{n-1})
  double min_phi_sample = 0;    // positivity certificate
  int positivity_samples = 0;
  double normalization = 0;     // sqrt(avg phi_raw^2): phi_normalized = phi_raw / this
  double l2_dist_to_one = 0;    // ||phi_normalized - 1||_{L^2 sphere}
  double fit_error = 0;         // rms error of the conformal-power fit (n > 2)
  std::vector<double> coeffs;   // normalized solution in the function basis
};

struct ProjectionResult {
  QForm phi_raw;                          // unnormalized rational solution
  std::optional<HermitianMetric> projected;  // exact (n = 2: phi omega is polynomial)
  std::optional<FForm> projected_float;      // float fundamental form (n > 2)
  GalerkinReport report;
};

// Weak Galerkin solve of the conformal Gauduchon equation: find phi in the
// degree-<= d function basis with
//    Int dd^c(u_j) ^ (phi omega^{n-1}) = 0   for every test function u_j,
// normalized by the mean-square condition and phi > 0. The equal-degree
// system always has a nonzero exact kernel (the constant test row vanishes);
// the solution is the Gram projection of the constant function onto that
// kernel, which returns phi = 1 exactly on Gauduchon inputs.
inline ProjectionResult gauduchon_projection(const HermitianMetric& g, int d,
                                             int positivity_samples = 2000, uint64_t seed = 23) {
  int n = g.n();
  std::vector<QForm> basis = real_function_basis(n, d);
  int m = int(basis.size());
  FsPairing pairing(n);
  // tau_j = ratio of dd^c(u_j) ^ omega^{n-1} against fs^n, exact.
  std::vector<QPoly> tau;
  tau.reserve(size_t(m));
  const QForm& wn1 = g.omega_power(n - 1);
  for (const auto& u : basis) {
    QForm top = u.dc().exterior_d().wedge(wn1);
    if (top.reduced().is_zero()) {
      tau.push_back(QPoly(n + 1, 0, 0));
      continue;
    }
    auto r = top.top_ratio();
    tau.push_back(r.num);
  }
  // A_{j,i} = Int dd^c(u_j) ^ (u_i omega^{n-1}) = sphere average of tau_j u_i.
  QMat A(m, m);
  for (int j = 0; j < m; ++j) {
    if (tau[size_t(j)].is_zero()) continue;
    for (int i = 0; i < m; ++i) {
      GaussRat v = sphere_bilinear(tau[size_t(j)], basis[size_t(i)].components().begin()->second.num,
                                   MultiIndex(n + 1), MultiIndex(n + 1));
      require(v.is_real(), Errc::Internal, "weak system entry must be real");
      A.at(j, i) = v.re;
    }
  }
  // Mass matrix and the coordinates of the constant function.
  QMat N(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      GaussRat v = sphere_bilinear(basis[size_t(i)].components().begin()->second.num,
                                   basis[size_t(j)].components().begin()->second.num,
                                   MultiIndex(n + 1), MultiIndex(n + 1));
      N.at(i, j) = v.re;
      N.at(j, i) = v.re;
    }
  std::vector<mpq_class> c0;
  {
    QForm one = QForm::function(QPoly::norm_sq(n + 1).mul_norm_pow(d - 1), d);
    if (d == 0) one = QForm::constant_fn(n + 1, GaussRat(1));
    std::vector<QForm> imgs = basis;
    imgs.push_back(one);
    QMat withone = linearize_images(imgs);
    QMat sys(withone.rows, m);
    std::vector<mpq_class> rhs(size_t(withone.rows));
    for (int r = 0; r < withone.rows; ++r) {
      for (int c = 0; c < m; ++c) sys.at(r, c) = withone.at(r, c);
      rhs[size_t(r)] = withone.at(r, m);
    }
    auto sol = solve(sys, rhs);
    require(sol.has_value(), Errc::Internal, "constant not representable in the function basis");
    c0 = *sol;
  }
  // Exact kernel and the Gram projection of the constant onto it.
  QMat K = nullspace(A);
  ProjectionResult out;
  out.report.degree = d;
  out.report.basis_dim = m;
  out.report.kernel_dim = K.cols;
  require(K.cols >= 1, Errc::IllConditioned, "weak system has trivial kernel");
  std::vector<mpq_class> phi_coords;
  {
    QMat NK = N * K;
    QMat KtNK = K.transpose() * NK;
    std::vector<mpq_class> rhs = K.transpose().apply(N.apply(c0));
    auto y = solve(KtNK, rhs);
    require(y.has_value(), Errc::SingularGram, "kernel Gram solve failed");
    phi_coords = K.apply(*y);
    bool zero = true;
    for (const auto& v : phi_coords)
      if (v != 0) zero = false;
    if (zero) {
      // constants orthogonal to the kernel: fall back to the first kernel
      // vector (deterministic)
      phi_coords.assign(size_t(m), 0);
      for (int r = 0; r < m; ++r) phi_coords[size_t(r)] = K.at(r, 0);
    }
  }
  // Materialize phi.
  QForm phi = QForm::zero(n + 1, 0);
  for (int i = 0; i < m; ++i)
    if (phi_coords[size_t(i)] != 0) phi += basis[size_t(i)].scaled(GaussRat(phi_coords[size_t(i)]));
  require(!phi.reduced().is_zero(), Errc::IllConditioned, "zero solution");
  // Sign fix at e_0 (fall back to the next basis point when zero there).
  {
    const QPoly& num = phi.components().begin()->second.num;
    mpq_class s = 0;
    for (int j = 0; j <= n && s == 0; ++j) {
      std::vector<GaussRat> e(size_t(n + 1));
      e[size_t(j)] = GaussRat(1);
      GaussRat v = num.evaluate(e);
      require(v.is_real(), Errc::Internal, "phi must be real");
      s = v.re;
    }
    if (s < 0) phi = phi.scaled(GaussRat(-1));
  }
  out.phi_raw = phi;
  // Residual of the weak system (exactly zero by construction; reported).
  {
    std::vector<mpq_class> r = A.apply(phi_coords);
    double acc = 0;
    for (const auto& v : r) acc += v.get_d() * v.get_d();
    out.report.weak_residual = std::sqrt(acc);
  }
  // Normalization and distance to 1.
  const QPoly& phinum = phi.components().begin()->second.num;
  mpq_class norm2 = sphere_bilinear(phinum, phinum, MultiIndex(n + 1), MultiIndex(n + 1)).re;
  out.report.normalization = std::sqrt(norm2.get_d());
  {
    mpq_class mean = phinum.sphere_integral();
    // || phi/|phi| - 1 ||^2 = 2 - 2 mean/|phi|
    double nrm = out.report.normalization;
    double v = std::max(0.0, 2.0 - 2.0 * mean.get_d() / nrm);
    out.report.l2_dist_to_one = std::sqrt(v);
  }
  out.report.coeffs.reserve(size_t(m));
  for (const auto& v : phi_coords) out.report.coeffs.push_back(v.get_d() / out.report.normalization);
  // Positivity certificate.
  {
    FForm phif = phi.to_float();
    const auto& comp = phif.components().begin()->second;
    out.report.positivity_samples = positivity_samples;
    out.report.min_phi_sample = std::numeric_limits<double>::infinity();
    for (const auto& p : sample_sigma(n, positivity_samples, seed)) {
      double v = comp.num.evaluate(p.coords).real() / out.report.normalization;
      if (v < out.report.min_phi_sample) out.report.min_phi_sample = v;
      if (v <= 0)
        fail(Errc::NotPositiveSolution,
             "phi changes sign at truncation (sampled value " + std::to_string(v) + ")");
    }
  }
  // The projected metric: the conformal factor on the metric is
  // phi^{1/(n-1)}, so the fundamental form rescales by the same power.
  if (n == 2) {
    const auto& comp = phi.components().begin()->second;
    QForm omega_hat = g.omega().scaled_by_function(QForm::Ratio{comp.num, comp.den_pow});
    out.projected = HermitianMetric::from_form(std::move(omega_hat), 256, seed);
    out.report.defect = out.projected->gauduchon_defect();
    out.report.fit_error = 0;
  } else {
    // Least-squares fit of phi_normalized^{1/(n-1)} in the same basis.
    int fit_pts = 4000;
    auto pts = sample_sigma(n, fit_pts, seed ^ 0xabcdef);
    Eigen::MatrixXd M(fit_pts, m);
    Eigen::VectorXd b(fit_pts);
    std::vector<FPoly> bnum;
    for (const auto& u : basis) bnum.push_back(u.components().begin()->second.num.to_float());
    FForm phif = phi.to_float();
    const auto& pcomp = phif.components().begin()->second;
    for (int s = 0; s < fit_pts; ++s) {
      for (int i = 0; i < m; ++i) M(s, i) = bnum[size_t(i)].evaluate(pts[size_t(s)].coords).real();
      double v = pcomp.num.evaluate(pts[size_t(s)].coords).real() / out.report.normalization;
      require(v > 0, Errc::NotPositiveSolution, "phi nonpositive at a fit sample");
      b(s) = std::pow(v, 1.0 / double(n - 1));
    }
    Eigen::VectorXd h = M.colPivHouseholderQr().solve(b);
    out.report.fit_error = std::sqrt((M * h - b).squaredNorm() / fit_pts);
    FForm hsum(n + 1, 0);
    for (int i = 0; i < m; ++i)
      if (h(i) != 0) hsum += basis[size_t(i)].to_float().scaled(CD(h(i), 0));
    const auto& hcomp = hsum.components().begin()->second;
    out.projected_float =
        g.omega_float().scaled_by_function(FForm::Ratio{hcomp.num, hcomp.den_pow});
    out.report.defect = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Galerkin least-squares solve of the dual-Radon equation R*_g(psi) = 1,
// tested against the degree-<= d function basis with the exact sigma-grid as
// quadrature. The induced measure d mu = psi dVol_g then satisfies the
// integral geometric formula on test functions.
// ---------------------------------------------------------------------------
struct MeasureSolveReport {
  int degree = 0;
  double residual = 0;          // least-squares residual of the discrete system
  double min_psi_sample = 0;
  int positivity_samples = 0;
  double igf_identity_residual = 0;  // worst case over the test functions
  std::vector<double> coeffs;
};

inline MeasureSolveReport igf_measure_solve(const HermitianMetric& g, int d, uint64_t seed = 29) {
  int n = g.n();
  std::vector<QForm> basis = real_function_basis(n, d);
  int m = int(basis.size());
  const Cubature& cub = cubature_for(n);
  auto pts = cub.points();
  int P = int(pts.size());
  const QForm& wn1 = g.omega_power(n - 1);
  auto vol_ratio = g.omega_power(n).top_ratio();  // density of dVol_g against the sphere measure
  // Precompute, per grid point: the pulled-back weight form and density.
  auto dens = std::vector<double>(size_t(P));
  auto wts = std::vector<double>(size_t(P));
  auto area = std::vector<double>(size_t(P));
  Eigen::MatrixXd Rg(P, m);  // R_g(u_j)(sigma_p)
  for (int p = 0; p < P; ++p) {
    const auto& [sigma, w] = pts[size_t(p)];
    wts[size_t(p)] = w.get_d();
    GaussRat dv = vol_ratio.num.evaluate(sigma.coords);
    dens[size_t(p)] = dv.re.get_d();
    QForm pb = wn1.equator_pullback(sigma);
    mpq_class a = pb.integrate_cpn();
    area[size_t(p)] = a.get_d();
    for (int j = 0; j < m; ++j) {
      QForm fpb = basis[size_t(j)].equator_pullback(sigma);
      if (fpb.is_zero()) {
        Rg(p, j) = 0;
        continue;
      }
      const auto& c = fpb.components().begin()->second;
      mpq_class num = pb.scaled_by_function(QForm::Ratio{c.num, c.den_pow}).integrate_cpn();
      Rg(p, j) = num.get_d() / area[size_t(p)];
    }
  }
  // Rows: Int R_g(u_j) psi dVol_g = Int u_j dVol_g, assembled over the grid.
  double nf = factorial_z(unsigned(n)).get_d();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd b(m);
  std::vector<FPoly> bnum;
  auto bval = std::vector<std::vector<double>>(size_t(P), std::vector<double>(size_t(m)));
  for (const auto& u : basis) bnum.push_back(u.components().begin()->second.num.to_float());
  for (int p = 0; p < P; ++p) {
    auto z = pts[size_t(p)].first.to_cd();
    for (int s = 0; s < m; ++s) bval[size_t(p)][size_t(s)] = bnum[size_t(s)].evaluate(z).real();
  }
  for (int j = 0; j < m; ++j) {
    for (int s = 0; s < m; ++s) {
      double acc = 0;
      for (int p = 0; p < P; ++p)
        acc += wts[size_t(p)] * Rg(p, j) * bval[size_t(p)][size_t(s)] * dens[size_t(p)];
      M(j, s) = acc / nf;
    }
    mpq_class rhs = basis[size_t(j)].scaled_by_function(
        QForm::Ratio{vol_ratio.num, vol_ratio.den_pow}).components().begin()->second.num.sphere_integral();
    b(j) = rhs.get_d() / nf;
  }
  Eigen::VectorXd c = M.colPivHouseholderQr().solve(b);
  MeasureSolveReport rep;
  rep.degree = d;
  rep.residual = (M * c - b).norm();
  for (int s = 0; s < m; ++s) rep.coeffs.push_back(c(s));
  // Positivity of psi.
  rep.positivity_samples = 2000;
  rep.min_psi_sample = std::numeric_limits<double>::infinity();
  for (const auto& p : sample_sigma(n, rep.positivity_samples, seed)) {
    double v = 0;
    for (int s = 0; s < m; ++s) v += c(s) * bnum[size_t(s)].evaluate(p.coords).real();
    rep.min_psi_sample = std::min(rep.min_psi_sample, v);
  }
  require(rep.min_psi_sample > 0, Errc::NotPositiveSolution, "psi changes sign at truncation");
  // Induced integral geometric identity on random polynomial test functions.
  {
    std::mt19937_64 rng(seed ^ 0x5bd1e995);
    double worst = 0;
    for (int t = 0; t < 10; ++t) {
      // random test function of degree <= d
      auto coef = std::vector<double>(size_t(m));
      for (auto& v : coef) v = double(long(rng() % 9) - 4) / double(1 + long(rng() % 3));
      double lhs = 0, rhs = 0;
      for (int p = 0; p < P; ++p) {
        double rf = 0, psi = 0;
        for (int s = 0; s < m; ++s) {
          rf += coef[size_t(s)] * Rg(p, s);
          psi += c(s) * bval[size_t(p)][size_t(s)];
        }
        lhs += wts[size_t(p)] * rf * psi * dens[size_t(p)] / nf;
      }
      for (int s = 0; s < m; ++s) rhs += coef[size_t(s)] * b(s);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    rep.igf_identity_residual = worst;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Theorem E margins over a conformal family around fs: rho is compared via
// the sampled-equator upper bound for non-Gauduchon inputs (documented
// semantics), and via the projected metric for the Gauduchon side.
// ---------------------------------------------------------------------------
struct TheoremEReport {
  double rho_g_upper = 0;        // min over sampled sigma of M_sigma(g): an upper
                                 // bound for rho(g), never the systole itself
  double rho_projected = 0;      // mean functional of the projected metric; equals
                                 // rho on Gauduchon metrics, so this estimates
                                 // rho(projection) up to the truncation defect
  double rho_projected_min = 0;  // conservative min-over-sigma value
  double margin_a = 0;           // rho_projected - rho_g_upper
  double margin_b = 0;           // rho_projected - rho(fs)
  bool inequality_a_holds = false;
  bool inequality_b_holds = false;
  double projected_area_spread = 0;  // relative sigma-spread of the projected areas
  std::string semantics =
      "rho of non-Gauduchon inputs is the min over sampled equators (an upper bound); "
      "rho of the projected metric is its mean functional, which coincides with rho "
      "on Gauduchon metrics, with the sigma-spread reported as the truncation "
      "uncertainty";
};

inline TheoremEReport theorem_e_check(const HermitianMetric& g, int d, int sigma_samples = 100,
                                      uint64_t seed = 31, double tol = 1e-10) {
  require(g.n() == 2, Errc::ConfigInvalid, "theorem E checks run at n = 2");
  TheoremEReport rep;
  auto sigmas = sample_sigma(g.n(), sigma_samples, seed);
  rep.rho_g_upper = g.systole_upper_bound_normalized(sigmas);
  ProjectionResult proj = gauduchon_projection(g, d);
  const HermitianMetric& gh = *proj.projected;
  double lo = std::numeric_limits<double>::infinity(), hi = 0, mean = 0;
  for (const auto& s : sigmas) {
    double a = gh.area_equator(s);
    lo = std::min(lo, a);
    hi = std::max(hi, a);
    mean += a;
  }
  mean /= double(sigmas.size());
  rep.projected_area_spread = (hi - lo) / mean;
  rep.rho_projected = gh.mean_functional();
  rep.rho_projected_min = lo / gh.volume_normalizer();
  rep.margin_a = rep.rho_projected - rep.rho_g_upper;
  rep.margin_b = rep.rho_projected - rho_fs(g.n());
  rep.inequality_a_holds = rep.margin_a >= -tol;
  rep.inequality_b_holds = rep.margin_b >= -tol;
  return rep;
}

}  // namespace cpsys
