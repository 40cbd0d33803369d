#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cpsys/fixtures.hpp"
#include "cpsys/radon.hpp"

using namespace cpsys;

namespace {

QForm fs(int n) { return QForm::fubini_study(n); }

QForm z0_fn(int nv) {
  return QForm::function(QPoly::monomial(nv, MultiIndex::unit(nv, 0), MultiIndex::unit(nv, 0), GaussRat(1)), 1);
}

QForm random_real_function(int n, int s, std::mt19937_64& rng) {
  auto basis = real_function_basis(n, s);
  QForm f = QForm::zero(n + 1, 0);
  for (const auto& b : basis) {
    long c = long(rng() % 5) - 2;
    if (c != 0) f += b.scaled(GaussRat(c));
  }
  if (f.reduced().is_zero()) f = basis[1];
  return f;
}

// Random real (1,1) horizontal polynomial form with coefficient bidegree <= (2,2).
QForm random_2form(std::mt19937_64& rng) {
  static const QMat horiz = [] {
    DirectionSpace ds = DirectionSpace::create(2, 2);
    std::vector<QForm> imgs;
    for (int r = 0; r < ds.dim(); ++r) imgs.push_back(ds.basis_form(r).euler_contraction(false));
    return nullspace(linearize_images(imgs));
  }();
  DirectionSpace ds = DirectionSpace::create(2, 2);
  std::vector<mpq_class> x(size_t(horiz.cols));
  for (auto& v : x) {
    v = mpq_class(long(rng() % 7) - 3, 1 + long(rng() % 3));
    v.canonicalize();
  }
  return ds.materialize(horiz.apply(x));
}

const ProjPoint<GaussRat> sigma345 =
    unit_point(std::vector<GaussRat>{GaussRat(mpq_class(3, 5)), GaussRat(mpq_class(4, 5)), GaussRat(0)});

// Exact evaluation of a scale-invariant function at a unit point.
GaussRat phi_eval(const QForm& f, const ProjPoint<GaussRat>& p) {
  if (f.is_zero()) return GaussRat(0);
  const auto& comp = f.components().begin()->second;
  return comp.num.evaluate(p.coords);
}

}  // namespace

TEST_CASE("radon_fn basics") {
  // constants average to themselves
  QForm c = QForm::constant_fn(3, GaussRat(mpq_class(7, 3)));
  CHECK(radon_fn(c, basis_point(3, 0)) == mpq_class(7, 3));
  CHECK(radon_fn(c, sigma345) == mpq_class(7, 3));
  // f = |z_0|^2/|z|^2 averages to 0 on the equator of e_0 and 1/2 on e_1
  CHECK(radon_fn(z0_fn(3), basis_point(3, 0)) == 0);
  CHECK(radon_fn(z0_fn(3), basis_point(3, 1)) == mpq_class(1, 2));
}

TEST_CASE("radon_form basics") {
  CHECK(radon_form(fs(2), basis_point(3, 1)) == 1);
  CHECK(radon_form(fs(2), sigma345) == 1);
  CHECK(radon_form(fs(3).wedge_pow(2), basis_point(4, 2)) == 1);
  // exact forms integrate to zero over the closed equator
  std::mt19937_64 rng(7);
  for (int t = 0; t < 5; ++t) {
    QForm u = random_real_function(2, 1, rng);
    QForm alpha = u.wedge(u.exterior_d());
    CHECK(radon_form(alpha.exterior_d(), sigma345) == 0);
  }
  // omega_g^{n-1} integrates to (n-1)! A_g(sigma)
  for (const auto& fx : standard_fixtures(2)) {
    mpq_class lhs = radon_form(fx.metric.omega_power(1), sigma345);
    mpq_class rhs = fx.metric.area_equator_exact(sigma345) * factorial_z(1);
    CHECK(lhs == rhs);
  }
}

TEST_CASE("dual transform and the duality pairing") {
  // R*(const) = const (the spec's normalization R*(1) = 1)
  CHECK(dual_radon(QForm::constant_fn(3, GaussRat(1)), basis_point(3, 0)) == 1);
  // mirror example
  CHECK(dual_radon(z0_fn(3), basis_point(3, 0)) == 0);

  // duality: the cubature evaluates both sides of
  //   Int R(phi) psi dVol = Int phi R*(psi) dVol
  // exactly for polynomial phi, psi of bidegree (1,1).
  std::mt19937_64 rng(17);
  const Cubature& cub = cubature_for(2);
  for (int t = 0; t < 4; ++t) {
    QForm phi = random_real_function(2, 1, rng);
    QForm psi = random_real_function(2, 1, rng);
    GaussRat lhs = cub.average([&](const ProjPoint<GaussRat>& s) {
      return GaussRat(radon_fn(phi, s)) * phi_eval(psi, s);
    });
    GaussRat rhs = cub.average([&](const ProjPoint<GaussRat>& s) {
      return phi_eval(phi, s) * GaussRat(dual_radon(psi, s));
    });
    CHECK(lhs == rhs);
  }
}

TEST_CASE("zero average radon transform") {
  // fs^{n-1} is its own average: zero
  CHECK(zero_avg_radon(fs(2), basis_point(3, 0)) == 0);
  CHECK(zero_avg_radon(fs(2), sigma345) == 0);

  // dd^c lambda is in the kernel: 20 random lambda, 5 rational sigma
  std::vector<ProjPoint<GaussRat>> sigmas = {
      basis_point(3, 0), basis_point(3, 1), basis_point(3, 2), sigma345,
      unit_point(std::vector<GaussRat>{GaussRat(mpq_class(1, 3)), GaussRat(mpq_class(2, 3)),
                                       GaussRat(mpq_class(2, 3))})};
  std::mt19937_64 rng(29);
  for (int t = 0; t < 20; ++t) {
    QForm lambda = random_real_function(2, 1 + int(rng() % 2), rng);
    QForm xi = lambda.dc().exterior_d();
    for (const auto& s : sigmas) CHECK(zero_avg_radon(xi, s) == 0);
  }

  // f fs with f = |z_0|^2/|z|^2: value at e_0 is 0 - 1/3
  QForm xi = fs(2).scaled_by_function(QForm::Ratio{
      QPoly::monomial(3, MultiIndex::unit(3, 0), MultiIndex::unit(3, 0), GaussRat(1)), 1});
  CHECK(zero_avg_radon(xi, basis_point(3, 0)) == mpq_class(-1, 3));
}

TEST_CASE("cubature exactness") {
  for (int n = 2; n <= 3; ++n) {
    const Cubature& cub = cubature_for(n);
    // all diagonal monomials up to the advertised degree, plus a sweep of
    // off-diagonal pairs, in a single pass over the expanded grid
    std::vector<TermKey> monos;
    for (int d = 0; d <= cub.exact_degree; ++d) {
      std::vector<TermKey> level;
      DirectionSpace::enumerate_monomials(n + 1, d, level);
      int skip = 0;
      for (const auto& m : level)
        if (m.alpha == m.beta || (skip++ % 11 == 0)) monos.push_back(m);
    }
    std::vector<GaussRat> sums(monos.size());
    auto pts = cub.points();
    for (const auto& [p, w] : pts) {
      GaussRat wq{w};
      for (size_t e = 0; e < monos.size(); ++e) {
        GaussRat acc(1);
        for (int j = 0; j < n + 1; ++j) {
          for (int t = 0; t < monos[e].alpha[j]; ++t) acc *= p.coords[size_t(j)];
          GaussRat c = p.coords[size_t(j)].conj();
          for (int t = 0; t < monos[e].beta[j]; ++t) acc *= c;
        }
        sums[e] += wq * acc;
      }
    }
    for (size_t e = 0; e < monos.size(); ++e) {
      GaussRat want = monos[e].alpha == monos[e].beta
                          ? GaussRat(sphere_moment(n + 1, monos[e].alpha))
                          : GaussRat(0);
      CHECK(sums[e] == want);
    }
  }
}

TEST_CASE("integral geometric formula: exact residual zero") {
  // fs^{n-1} and f fs^{n-1}
  CHECK(igf_check(fs(2)).residual == 0);
  QForm f_fs = fs(2).scaled_by_function(QForm::Ratio{
      QPoly::monomial(3, MultiIndex::unit(3, 0), MultiIndex::unit(3, 0), GaussRat(1)), 1});
  IgfResult r = igf_check(f_fs);
  CHECK(r.rhs == mpq_class(1, 3));
  CHECK(r.residual == 0);

  // 20 random (1,1) polynomial forms with coefficient degree <= 2
  std::mt19937_64 rng(41);
  for (int t = 0; t < 20; ++t) {
    QForm xi = random_2form(rng);
    CHECK(igf_check(xi).residual == 0);
  }
}

TEST_CASE("igf float mode") {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 5; ++t) {
    FForm xi = random_2form(rng).to_float();
    CHECK(std::abs(igf_check_float(xi)) <= 1e-10);
  }
}

TEST_CASE("radon injectivity evidence") {
  RadonGram rg1 = radon_injectivity(2, 1);
  CHECK(int(rg1.labels.size()) == 8);  // 9 Hermitian monomials minus the average
  CHECK(rg1.min_singular_value > 1e-6);

  RadonGram rg2 = radon_injectivity(2, 2);
  CHECK(int(rg2.labels.size()) == 35);
  CHECK(rg2.min_singular_value > 1e-6);

  CHECK_THROWS_AS(radon_injectivity(1, 1), Error);
}
