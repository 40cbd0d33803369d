#include "cpsys/fixtures.hpp"

#include "cpsys/variation.hpp"

namespace cpsys {

QForm conformal_bump(int n) {
  int nv = n + 1;
  QPoly p = QPoly::monomial(nv, MultiIndex::unit(nv, 0), MultiIndex::unit(nv, 0), GaussRat(1));
  p -= QPoly::norm_sq(nv).scaled(GaussRat(mpq_class(1, nv)));
  return QForm::function(p, 1);
}

HermitianMetric conformal_metric(int n, const mpq_class& eps) {
  QForm f = conformal_bump(n);
  const auto& comp = f.components().begin()->second;
  QForm::Ratio factor{QPoly::constant(n + 1, GaussRat(1)).mul_norm_pow(comp.den_pow) +
                          comp.num.scaled(GaussRat(eps)),
                      comp.den_pow};
  return HermitianMetric::from_form(QForm::fubini_study(n).scaled_by_function(factor));
}

HermitianMetric kahler_bump_metric(int n, const mpq_class& t) {
  int nv = n + 1;
  QForm u = QForm::function(
      QPoly::monomial(nv, MultiIndex::unit(nv, 0), MultiIndex::unit(nv, 0), GaussRat(1)), 1);
  QForm omega = QForm::fubini_study(n) + u.dc().exterior_d().scaled(GaussRat(t));
  return HermitianMetric::from_form(std::move(omega));
}

const QForm& gauduchon_nonkahler_direction() {
  static QForm eta = [] {
    TangentBasis gb = gauduchon_tangent_basis(2, 2);
    for (const auto& dir : gb.directions) {
      if (dir.is_kahler_dir) continue;
      // Clear denominators so the fixture has small integer coefficients.
      mpz_class lcm = 1;
      for (const auto& [k, comp] : dir.eta.components())
        for (const auto& [tk, c] : comp.num.terms()) {
          mpz_class l;
          mpz_lcm(l.get_mpz_t(), lcm.get_mpz_t(), c.re.get_den().get_mpz_t());
          mpz_lcm(lcm.get_mpz_t(), l.get_mpz_t(), c.im.get_den().get_mpz_t());
        }
      return dir.eta.scaled(GaussRat(mpq_class(lcm)));
    }
    fail(Errc::EmptyBasis, "no non-closed Gauduchon direction found at degree 2");
  }();
  return eta;
}

HermitianMetric gauduchon_only_metric(const mpq_class& t) {
  QForm omega = QForm::fubini_study(2) + gauduchon_nonkahler_direction().scaled(GaussRat(t));
  return HermitianMetric::from_form(std::move(omega));
}

const std::vector<MetricFixture>& standard_fixtures(int n) {
  static std::map<int, std::vector<MetricFixture>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<MetricFixture> v;
  v.push_back({"fs", "Fubini-Study form, unit normalization", fubini_study_metric(n)});
  v.push_back({"fs_scaled_2", "2 * fs (homothety)",
               HermitianMetric::from_form(QForm::fubini_study(n).scaled(GaussRat(2)), 64, 2)});
  v.push_back({"kahler_bump", "fs + (1/8) dd^c(|z_0|^2/|z|^2)", kahler_bump_metric(n, mpq_class(1, 8))});
  if (n == 2)
    v.push_back({"gauduchon_nonkahler", "fs + t * (non-closed dd^c-closed degree-2 direction)",
                 gauduchon_only_metric(mpq_class(1, 64))});
  v.push_back({"conformal_eps_tenth", "(1 + f/10) fs with f the zero-average |z_0|^2 harmonic",
               conformal_metric(n, mpq_class(1, 10))});
  v.push_back({"conformal_eps_20th", "(1 + f/20) fs", conformal_metric(n, mpq_class(1, 20))});
  return cache.emplace(n, std::move(v)).first->second;
}

}  // namespace cpsys
