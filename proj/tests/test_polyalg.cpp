#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cpsys/ambient.hpp"
#include "cpsys/bihom_poly.hpp"

using namespace cpsys;

namespace {

QPoly mono(int nv, std::vector<int> a, std::vector<int> b, GaussRat c = GaussRat(1)) {
  MultiIndex ma(nv), mb(nv);
  for (int j = 0; j < nv; ++j) {
    ma[j] = uint8_t(a[size_t(j)]);
    mb[j] = uint8_t(b[size_t(j)]);
  }
  return QPoly::monomial(nv, ma, mb, c);
}

// Independent Monte-Carlo oracle for the sphere moments: draw uniform points
// on S^{2n+1} via normalized complex Gaussians and average the monomial.
double mc_sphere_average(const QPoly& p, int samples, uint64_t seed) {
  auto pts = sample_sigma(p.nvars() - 1, samples, seed);
  double acc = 0;
  FPoly pf = p.to_float();
  for (const auto& pt : pts) acc += pf.evaluate(pt.coords).real();
  return acc / samples;
}

QPoly random_poly(int nv, int deg, std::mt19937_64& rng) {
  QPoly p(nv, deg, deg);
  for (int t = 0; t < 6; ++t) {
    MultiIndex a(nv), b(nv);
    for (int d = 0; d < deg; ++d) a[int(rng() % nv)]++;
    for (int d = 0; d < deg; ++d) b[int(rng() % nv)]++;
    long re = long(rng() % 9) - 4;
    long im = long(rng() % 9) - 4;
    p.add_term(TermKey{a, b}, GaussRat(mpq_class(re), mpq_class(im)));
  }
  return p;
}

}  // namespace

TEST_CASE("arithmetic basics") {
  // z_0 zbar_0 + z_1 zbar_1 with n=1 gives |z|^2
  QPoly a = mono(2, {1, 0}, {1, 0});
  QPoly b = mono(2, {0, 1}, {0, 1});
  CHECK(a + b == QPoly::norm_sq(2));

  // (z_0 zbar_1)(z_1 zbar_0) = z_0 z_1 zbar_0 zbar_1, bidegree (2,2)
  QPoly c = mono(3, {1, 0, 0}, {0, 1, 0}) * mono(3, {0, 1, 0}, {1, 0, 0});
  CHECK(c == mono(3, {1, 1, 0}, {1, 1, 0}));
  CHECK(c.adeg() == 2);
  CHECK(c.bdeg() == 2);

  // scale by 2+i
  QPoly s = mono(3, {1, 0, 0}, {1, 0, 0}).scaled(GaussRat(mpq_class(2), mpq_class(1)));
  CHECK(s.terms().begin()->second == GaussRat(mpq_class(2), mpq_class(1)));

  CHECK_THROWS_AS(a += mono(2, {2, 0}, {2, 0}), Error);
}

TEST_CASE("wirtinger derivatives") {
  // d/dz_0 (z_0^2 zbar_1) = 2 z_0 zbar_1
  QPoly p = mono(2, {2, 0}, {0, 1});
  CHECK(p.wirtinger(0, QPoly::WirtKind::Holomorphic) == mono(2, {1, 0}, {0, 1}, GaussRat(2)));

  // d/dzbar_1 (z_0 zbar_0) = 0
  QPoly q = mono(2, {1, 0}, {1, 0});
  CHECK(q.wirtinger(1, QPoly::WirtKind::Antiholomorphic).is_zero());

  // d/dzbar_0 then d/dz_0 of |z_0|^4 = 4 |z_0|^2
  QPoly r = mono(2, {2, 0}, {2, 0});
  QPoly d = r.wirtinger(0, QPoly::WirtKind::Antiholomorphic).wirtinger(0, QPoly::WirtKind::Holomorphic);
  CHECK(d == mono(2, {1, 0}, {1, 0}, GaussRat(4)));
}

TEST_CASE("wirtinger operators commute") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    QPoly p = random_poly(3, 2 + int(rng() % 2), rng);
    int j = int(rng() % 3), k = int(rng() % 3);
    QPoly a = p.wirtinger(j, QPoly::WirtKind::Holomorphic).wirtinger(k, QPoly::WirtKind::Antiholomorphic);
    QPoly b = p.wirtinger(k, QPoly::WirtKind::Antiholomorphic).wirtinger(j, QPoly::WirtKind::Holomorphic);
    CHECK(a == b);
  }
}

TEST_CASE("sphere integral closed form") {
  CHECK(QPoly::constant(3, GaussRat(1)).sphere_integral() == 1);
  // |z_0|^2 with n=1 -> 1/2
  CHECK(mono(2, {1, 0}, {1, 0}).sphere_integral() == mpq_class(1, 2));
  // |z_0|^4 with n=2 -> 1/6
  CHECK(mono(3, {2, 0, 0}, {2, 0, 0}).sphere_integral() == mpq_class(1, 6));
  // off-diagonal term integrates to zero by phase symmetry
  CHECK(mono(3, {1, 0, 0}, {0, 1, 0}).sphere_integral() == 0);
}

TEST_CASE("sphere integral matches Monte-Carlo oracle") {
  // 1e5-sample Monte Carlo with a generous band (5 standard errors).
  struct Case {
    QPoly p;
    double exact;
  };
  std::vector<Case> cases;
  cases.push_back({mono(3, {1, 0, 0}, {1, 0, 0}), sphere_moment(3, MultiIndex::unit(3, 0)).get_d()});
  cases.push_back({mono(3, {2, 0, 0}, {2, 0, 0}), 1.0 / 6});
  cases.push_back({mono(3, {1, 1, 0}, {1, 1, 0}), 1.0 / 12});
  uint64_t seed = 2024;
  for (auto& c : cases) {
    double mc = mc_sphere_average(c.p, 100000, seed++);
    double stderr_bound = 5.0 / std::sqrt(100000.0);
    CHECK(std::abs(mc - c.exact) < stderr_bound);
  }
}

TEST_CASE("sphere integral is invariant under exact unitaries") {
  std::mt19937_64 rng(5);
  auto us = random_exact_unitaries(3, 10, 99);
  for (const auto& U : us) {
    REQUIRE(U.is_unitary_exact());
    QPoly p = random_poly(3, 2, rng);
    // substitute z = U w
    std::vector<std::vector<GaussRat>> rows(3, std::vector<GaussRat>(3));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) rows[size_t(i)][size_t(j)] = U.at(i, j);
    QPoly q = p.substitute_linear(rows);
    CHECK(p.sphere_integral_c() == q.sphere_integral_c());
  }
}

TEST_CASE("evaluate") {
  QPoly p = mono(3, {1, 0, 0}, {1, 0, 0});  // |z_0|^2
  std::vector<CD> e0 = {CD(1, 0), CD(0, 0), CD(0, 0)};
  std::vector<CD> e1 = {CD(0, 0), CD(1, 0), CD(0, 0)};
  CHECK(p.to_float().evaluate(e0).real() == doctest::Approx(1.0));
  CHECK(p.to_float().evaluate(e1).real() == doctest::Approx(0.0));
  // z_0 zbar_1 at (1,1,0)/sqrt(2) -> 1/2
  QPoly q = mono(3, {1, 0, 0}, {0, 1, 0});
  double inv = 1.0 / std::sqrt(2.0);
  std::vector<CD> pt = {CD(inv, 0), CD(inv, 0), CD(0, 0)};
  CHECK(q.to_float().evaluate(pt).real() == doctest::Approx(0.5));
  CHECK_THROWS_AS(p.to_float().evaluate(std::vector<CD>{CD(1, 0)}), Error);
}

TEST_CASE("division by |z|^2") {
  QPoly p = mono(3, {1, 0, 0}, {1, 0, 0}) * QPoly::norm_sq(3);
  auto q = p.div_norm_pow(1);
  REQUIRE(q.has_value());
  CHECK(*q == mono(3, {1, 0, 0}, {1, 0, 0}));
  CHECK(!mono(3, {1, 0, 0}, {1, 0, 0}).div_norm_pow(1).has_value());
}

TEST_CASE("sphere_bilinear matches direct product integral") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    QPoly p = random_poly(3, 2, rng);
    QPoly q = random_poly(3, 1, rng);
    GaussRat direct = (p * q).sphere_integral_c();
    GaussRat paired = sphere_bilinear(p, q, MultiIndex(3), MultiIndex(3));
    CHECK(direct == paired);
  }
}

TEST_CASE("conjugation and reality") {
  QPoly p = mono(3, {1, 0, 0}, {0, 1, 0}, GaussRat(mpq_class(1), mpq_class(2)));
  QPoly herm = p + p.conjugate();
  CHECK(herm.is_real());
  CHECK(!p.is_real());
}
