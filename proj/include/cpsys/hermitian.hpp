#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <string>

#include "cpsys/poly_form.hpp"

namespace cpsys {

enum class MetricClass { Kahler, BalancedOnly, GauduchonOnly, None };

inline const char* metric_class_name(MetricClass c) {
  switch (c) {
    case MetricClass::Kahler: return "Kahler";
    case MetricClass::BalancedOnly: return "BalancedOnly";
    case MetricClass::GauduchonOnly: return "GauduchonOnly";
    case MetricClass::None: return "None";
  }
  return "?";
}

struct PositivityCertificate {
  int samples = 0;
  double min_eigenvalue = 0;
};

// Evaluate the Hermitian coefficient matrix of a real (1,1) form at a point
// and return its smallest eigenvalue restricted to the horizontal space z^perp.
inline double min_horizontal_eigenvalue(const FForm& omega, const ProjPoint<CD>& z) {
  int nv = omega.nvars();
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(nv, nv);
  for (const auto& [k, comp] : omega.components()) {
    if (set_size(k.I) != 1 || set_size(k.J) != 1) continue;
    int j = std::countr_zero(unsigned(k.I));
    int l = std::countr_zero(unsigned(k.J));
    CD v = comp.num.evaluate(z.coords);  // |z| = 1 so the denominator is 1
    H(j, l) += v / CD(0, 1);             // strip the packaged i
  }
  // Basis of z^perp: columns 1..n of the Householder unitary.
  Mat<CD> U = householder_to(z);
  Eigen::MatrixXcd M(nv, nv - 1);
  for (int i = 0; i < nv; ++i)
    for (int c = 1; c < nv; ++c) M(i, c - 1) = U.at(i, c);
  Eigen::MatrixXcd B = M.adjoint() * H * M;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es((B + B.adjoint()) / 2.0);
  return es.eigenvalues().minCoeff();
}

struct SystoleResult {
  mpq_class area;              // Area_g(Sigma_{e_0}) exactly
  mpq_class cohomology_coeff;  // a with omega^{n-1} ~ a fs^{n-1} mod d, d^c
  double value = 0;            // = area as double
};

// A Hermitian metric given by its fundamental form, exact coefficients.
class HermitianMetric {
 public:
  static HermitianMetric from_form(QForm omega, int samples = 2000, uint64_t seed = 1) {
    HermitianMetric g;
    require(omega.degree() == 2, Errc::MalformedForm, "fundamental form must have degree 2");
    for (const auto& [k, comp] : omega.components())
      require(set_size(k.I) == 1 && set_size(k.J) == 1, Errc::MalformedForm,
              "fundamental form must be of type (1,1)");
    omega.validate(/*require_real=*/true);
    g.n_ = omega.n();
    require(g.n_ >= 2, Errc::DimensionTooSmall, "metrics need n >= 2");
    g.omega_ = std::move(omega);
    g.omega_float_ = g.omega_.to_float();
    g.volume_ = g.omega_.wedge_pow(g.n_).integrate_cpn();
    g.volume_ /= factorial_z(unsigned(g.n_));
    require(g.volume_ > 0, Errc::NotPositive, "nonpositive volume");
    // Positivity certificate by sampling.
    auto pts = sample_sigma(g.n_, samples, seed);
    g.cert_.samples = samples;
    g.cert_.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) {
      double ev = min_horizontal_eigenvalue(g.omega_float_, p);
      if (ev < g.cert_.min_eigenvalue) g.cert_.min_eigenvalue = ev;
      if (ev <= 0) {
        std::string w = "witness point (";
        for (const auto& c : p.coords) w += std::to_string(c.real()) + "+" + std::to_string(c.imag()) + "i ";
        fail(Errc::NotPositive, "form not positive: min eigenvalue " + std::to_string(ev) + " at " + w + ")");
      }
    }
    return g;
  }

  int n() const { return n_; }
  const QForm& omega() const { return omega_; }
  const FForm& omega_float() const { return omega_float_; }
  const PositivityCertificate& certificate() const { return cert_; }

  const QForm& omega_power(int k) const {
    auto it = pow_cache_.find(k);
    if (it == pow_cache_.end()) it = pow_cache_.emplace(k, omega_.wedge_pow(k)).first;
    return it->second;
  }

  MetricClass classify() const {
    if (class_cache_) return *class_cache_;
    MetricClass c = MetricClass::None;
    if (omega_.exterior_d().reduced().is_zero())
      c = MetricClass::Kahler;
    else if (omega_power(n_ - 1).exterior_d().reduced().is_zero())
      c = MetricClass::BalancedOnly;
    else if (omega_power(n_ - 1).dc().exterior_d().reduced().is_zero())
      c = MetricClass::GauduchonOnly;
    class_cache_ = c;
    return c;
  }

  bool is_gauduchon() const { return classify() != MetricClass::None; }

  // Coefficient-size norm of dd^c(omega^{n-1}); zero iff Gauduchon.
  double gauduchon_defect() const {
    QForm defect = omega_power(n_ - 1).dc().exterior_d().reduced();
    double acc = 0;
    for (const auto& [k, comp] : defect.components())
      for (const auto& [tk, c] : comp.num.terms()) acc += std::norm(c.to_cd());
    return std::sqrt(acc);
  }

  mpq_class volume_exact() const { return volume_; }
  double volume() const { return volume_.get_d(); }
  double volume_normalizer() const {  // Vol^{(n-1)/n}
    return std::pow(volume_.get_d(), double(n_ - 1) / double(n_));
  }

  mpq_class area_equator_exact(const ProjPoint<GaussRat>& sigma) const {
    mpq_class a = omega_power(n_ - 1).integrate_equator(sigma);
    a /= factorial_z(unsigned(n_ - 1));
    return a;
  }
  double area_equator(const ProjPoint<CD>& sigma) const {
    double a = omega_float_power(n_ - 1).integrate_equator(sigma);
    return a / factorial_z(unsigned(n_ - 1)).get_d();
  }

  double m_sigma(const ProjPoint<CD>& sigma) const { return area_equator(sigma) / volume_normalizer(); }
  double m_sigma(const ProjPoint<GaussRat>& sigma) const {
    return area_equator_exact(sigma).get_d() / volume_normalizer();
  }

  // Exact numerator data of the mean functional: Int omega^{n-1} ^ fs.
  mpq_class mixed_integral_exact() const {
    return omega_power(n_ - 1).wedge(QForm::fubini_study(n_)).integrate_cpn();
  }

  // M(g) = (n!)^{(n-1)/n} / (n-1)! * Int omega^{n-1}^fs / (Int omega^n)^{(n-1)/n}
  double mean_functional() const {
    double nf = factorial_z(unsigned(n_)).get_d();
    double c = std::pow(nf, double(n_ - 1) / double(n_)) / factorial_z(unsigned(n_ - 1)).get_d();
    mpq_class vol_int = volume_ * factorial_z(unsigned(n_));
    return c * mixed_integral_exact().get_d() / std::pow(vol_int.get_d(), double(n_ - 1) / double(n_));
  }

  // Holomorphic (n-1)-systole for Gauduchon metrics: a single equator area,
  // cross-checked against the cohomology coefficient and sampled sigma.
  SystoleResult holomorphic_systole(int check_sigmas = 10, uint64_t seed = 5,
                                    double rel_tol = 1e-10) const {
    require(is_gauduchon(), Errc::NotGauduchon,
            "holomorphic systole is only computed for Gauduchon metrics; use "
            "systole_upper_bound for general Hermitian metrics");
    SystoleResult r;
    r.area = area_equator_exact(basis_point(n_ + 1, 0));
    r.cohomology_coeff = mixed_integral_exact();
    mpq_class predicted = r.cohomology_coeff / factorial_z(unsigned(n_ - 1));
    require(predicted == r.area, Errc::InconsistentAreas,
            "equator area disagrees with the cohomology coefficient");
    for (const auto& s : sample_sigma(n_, check_sigmas, seed)) {
      double a = area_equator(s);
      require(std::abs(a - r.area.get_d()) <= rel_tol * std::abs(r.area.get_d()),
              Errc::InconsistentAreas, "sigma-independence check failed at a sampled equator");
    }
    r.value = r.area.get_d();
    return r;
  }

  double rho() const { return holomorphic_systole().value / volume_normalizer(); }

  // Upper bound for the normalized systole of a general Hermitian metric:
  // min over the sampled equators. Never the systole itself.
  double systole_upper_bound_normalized(const std::vector<ProjPoint<CD>>& sigmas) const {
    require(!sigmas.empty(), Errc::ConfigInvalid, "need at least one sigma");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : sigmas) best = std::min(best, m_sigma(s));
    return best;
  }

  const FForm& omega_float_power(int k) const {
    auto it = fpow_cache_.find(k);
    if (it == fpow_cache_.end()) it = fpow_cache_.emplace(k, omega_float_.wedge_pow(k)).first;
    return it->second;
  }

 private:
  int n_ = 0;
  QForm omega_;
  FForm omega_float_;
  mpq_class volume_;
  PositivityCertificate cert_;
  mutable std::optional<MetricClass> class_cache_;
  mutable std::map<int, QForm> pow_cache_;
  mutable std::map<int, FForm> fpow_cache_;
};

// rho at the Fubini-Study metric: (n!)^{(n-1)/n} / (n-1)!.
inline double rho_fs(int n) {
  return std::pow(factorial_z(unsigned(n)).get_d(), double(n - 1) / double(n)) /
         factorial_z(unsigned(n - 1)).get_d();
}

inline HermitianMetric fubini_study_metric(int n) {
  return HermitianMetric::from_form(QForm::fubini_study(n), /*samples=*/64, /*seed=*/2);
}

}  // namespace cpsys
