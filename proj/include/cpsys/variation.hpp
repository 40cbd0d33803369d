#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "cpsys/hermitian.hpp"
#include "cpsys/linalg_exact.hpp"

namespace cpsys {

// ---------------------------------------------------------------------------
// Real coordinate space of (1,1) forms with numerator bidegree (d,d) over
// |z|^{2(d+1)}: the ambient space from which tangent bases are cut out by
// exact linear constraints.
// ---------------------------------------------------------------------------
class DirectionSpace {
 public:
  struct Slot {
    int j, k;            // component pair, j <= k
    TermKey mono;        // for j == k with mono.alpha == mono.beta: one real slot
    bool imag_part;      // which real coordinate of the complex coefficient
  };

  static DirectionSpace create(int n, int d) {
    DirectionSpace ds;
    ds.n_ = n;
    ds.d_ = d;
    int nv = n + 1;
    std::vector<TermKey> monos;
    enumerate_monomials(nv, d, monos);
    for (int j = 0; j < nv; ++j)
      for (int k = j; k < nv; ++k) {
        for (const TermKey& m : monos) {
          if (j == k) {
            // Hermitian polynomial: pair (alpha,beta) with (beta,alpha).
            if (m.beta < m.alpha) continue;  // one representative per pair
            if (m.alpha == m.beta) {
              ds.slots_.push_back(Slot{j, k, m, false});
            } else {
              ds.slots_.push_back(Slot{j, k, m, false});
              ds.slots_.push_back(Slot{j, k, m, true});
            }
          } else {
            ds.slots_.push_back(Slot{j, k, m, false});
            ds.slots_.push_back(Slot{j, k, m, true});
          }
        }
      }
    return ds;
  }

  int n() const { return n_; }
  int coeff_degree() const { return d_; }
  int dim() const { return int(slots_.size()); }
  int den_pow() const { return d_ + 1; }

  // The real basis form of one slot.
  QForm basis_form(int r) const {
    const Slot& s = slots_[size_t(r)];
    int nv = n_ + 1;
    QForm f(nv, 2);
    GaussRat c = s.imag_part ? GaussRat::imag_unit() : GaussRat(1);
    GaussRat ic = GaussRat::imag_unit() * c;
    f.add_component(FormKey{IdxSet(1u << s.j), IdxSet(1u << s.k)},
                    QPoly::monomial(nv, s.mono.alpha, s.mono.beta, ic), den_pow());
    bool self_conj = (s.j == s.k) && (s.mono.alpha == s.mono.beta);
    if (!self_conj)
      f.add_component(FormKey{IdxSet(1u << s.k), IdxSet(1u << s.j)},
                      QPoly::monomial(nv, s.mono.beta, s.mono.alpha, GaussRat::imag_unit() * c.conj()),
                      den_pow());
    return f;
  }

  QForm materialize(const std::vector<mpq_class>& x) const {
    require(int(x.size()) == dim(), Errc::Internal, "coordinate size mismatch");
    int nv = n_ + 1;
    QForm f(nv, 2);
    for (int r = 0; r < dim(); ++r) {
      if (x[size_t(r)] == 0) continue;
      f += basis_form(r).scaled(GaussRat(x[size_t(r)]));
    }
    return f;
  }

  // Inverse of materialize for forms lying in the space (exactly verified).
  std::vector<mpq_class> coordinates_of(const QForm& f) const {
    auto x = std::vector<mpq_class>(size_t(dim()));
    int nv = n_ + 1;
    for (int r = 0; r < dim(); ++r) {
      const Slot& s = slots_[size_t(r)];
      auto it = f.components().find(FormKey{IdxSet(1u << s.j), IdxSet(1u << s.k)});
      if (it == f.components().end()) continue;
      // align denominator to d+1
      QPoly num = it->second.num;
      int m = it->second.den_pow;
      if (m < den_pow()) {
        num = num.mul_norm_pow(den_pow() - m);
      } else if (m > den_pow()) {
        auto q = num.div_norm_pow(m - den_pow());
        require(q.has_value(), Errc::MalformedForm, "form outside coordinate space");
        num = *q;
      }
      auto tt = num.terms().find(s.mono);
      if (tt == num.terms().end()) continue;
      GaussRat c = tt->second / GaussRat::imag_unit();
      bool self_conj = (s.j == s.k) && (s.mono.alpha == s.mono.beta);
      if (self_conj) {
        x[size_t(r)] = c.re;
      } else {
        x[size_t(r)] = s.imag_part ? c.im : c.re;
      }
    }
    QForm recon = materialize(x);
    require((recon - f).reduced().is_zero(), Errc::MalformedForm,
            "form does not lie in the direction space");
    return x;
  }

  static void enumerate_monomials(int nv, int d, std::vector<TermKey>& out) {
    std::vector<MultiIndex> side;
    MultiIndex cur(nv);
    enumerate_side(nv, d, 0, cur, side);
    for (const auto& a : side)
      for (const auto& b : side) out.push_back(TermKey{a, b});
    std::sort(out.begin(), out.end());
  }

 private:
  static void enumerate_side(int nv, int rem, int pos, MultiIndex& cur, std::vector<MultiIndex>& out) {
    if (pos == nv - 1) {
      cur[pos] = uint8_t(rem);
      out.push_back(cur);
      cur[pos] = 0;
      return;
    }
    for (int e = 0; e <= rem; ++e) {
      cur[pos] = uint8_t(e);
      enumerate_side(nv, rem - e, pos + 1, cur, out);
    }
    cur[pos] = 0;
  }

  int n_ = 0, d_ = 0;
  std::vector<Slot> slots_;
};

// Stack the real-linear equations "image == 0" for a list of image forms
// (one per coordinate basis element) into an exact matrix.
inline QMat linearize_images(const std::vector<QForm>& images) {
  // Pass 1: per key, the common denominator power.
  std::map<FormKey, int> key_den;
  for (const auto& f : images)
    for (const auto& [k, comp] : f.components()) {
      auto [it, fresh] = key_den.emplace(k, comp.den_pow);
      if (!fresh) it->second = std::max(it->second, comp.den_pow);
    }
  // Pass 2: slot indices in deterministic order.
  std::map<std::pair<FormKey, TermKey>, int> slot_index;
  std::vector<std::map<std::pair<FormKey, TermKey>, GaussRat>> cooked(images.size());
  for (size_t c = 0; c < images.size(); ++c) {
    for (const auto& [k, comp] : images[c].components()) {
      QPoly num = comp.num.mul_norm_pow(key_den[k] - comp.den_pow);
      for (const auto& [tk, v] : num.terms()) {
        cooked[c].emplace(std::make_pair(k, tk), v);
        slot_index.emplace(std::make_pair(k, tk), 0);
      }
    }
  }
  int idx = 0;
  for (auto& [key, val] : slot_index) val = idx++;
  QMat m(2 * idx, int(images.size()));
  for (size_t c = 0; c < images.size(); ++c)
    for (const auto& [key, v] : cooked[c]) {
      int r = slot_index[key];
      m.at(2 * r, int(c)) = v.re;
      m.at(2 * r + 1, int(c)) = v.im;
    }
  return m;
}

inline QMat vstack(const QMat& a, const QMat& b) {
  require(a.cols == b.cols, Errc::Internal, "vstack width mismatch");
  QMat m(a.rows + b.rows, a.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) m.at(i, j) = a.at(i, j);
  for (int i = 0; i < b.rows; ++i)
    for (int j = 0; j < b.cols; ++j) m.at(a.rows + i, j) = b.at(i, j);
  return m;
}

// ---------------------------------------------------------------------------
// Exact pairings at the Fubini-Study base point.
// ---------------------------------------------------------------------------
class FsPairing {
 public:
  explicit FsPairing(int n) : n_(n) {}

  struct FormData {
    QPoly f_num;       // Lefschetz ratio numerator: a ^ fs^{n-1} = f fs^n
    int f_den = 0;
    mpq_class lef;     // Int a ^ fs^{n-1}
  };

  FormData analyze(const QForm& a) const {
    FormData d;
    if (a.is_zero()) {
      d.f_num = QPoly(n_ + 1, 0, 0);
      return d;
    }
    auto r = a.wedge(QForm::fs_power(n_, n_ - 1)).top_ratio();
    d.f_num = r.num;
    d.f_den = r.den_pow;
    d.lef = r.num.sphere_integral();
    return d;
  }

  // Int f_a f_b fs^n (the sphere average of the product of Lefschetz ratios).
  mpq_class s_pair(const FormData& a, const FormData& b) const {
    GaussRat v = sphere_bilinear(a.f_num, b.f_num, MultiIndex(n_ + 1), MultiIndex(n_ + 1));
    require(v.is_real(), Errc::Internal, "s_pair must be real");
    return v.re;
  }

  // Int a ^ b ^ fs^{n-2} for real (1,1) forms.
  mpq_class wedge_pair(const QForm& a, const QForm& b) const {
    if (n_ == 2) return wedge_pair_n2(a, b);
    return a.wedge(b).wedge(QForm::fs_power(n_, n_ - 2)).integrate_cpn();
  }

  // Q_omega at fs: lef(a) lef(b) - Int a^b^fs^{n-2}.
  mpq_class q_pair(const FormData& da, const FormData& db, const QForm& a, const QForm& b) const {
    return da.lef * db.lef - wedge_pair(a, b);
  }

  // L2(fs) inner product via the Lefschetz split (honest dVol = fs^n/n!).
  mpq_class l2_pair(const FormData& da, const FormData& db, const QForm& a, const QForm& b) const {
    mpq_class S = s_pair(da, db);
    mpq_class W = wedge_pair(a, b);
    mpq_class nf(factorial_z(unsigned(n_)));
    mpq_class n2f(factorial_z(unsigned(n_ - 2)));
    return mpq_class(n_) / nf * S - (W - S) / n2f;
  }

 private:
  // Fast exact path for n = 2: pair components directly under the vertical
  // completion instead of materializing the wedge product.
  mpq_class wedge_pair_n2(const QForm& a, const QForm& b) const {
    const auto& td = QForm::fs_top_data(2);
    GaussRat acc;
    IdxSet full = 0b111;
    for (const auto& [ka, ca] : a.components()) {
      if (set_size(ka.I) != 1 || set_size(ka.J) != 1) continue;
      for (const auto& [kb, cb] : b.components()) {
        if (set_size(kb.I) != 1 || set_size(kb.J) != 1) continue;
        if (ka.I & kb.I) continue;
        if (ka.J & kb.J) continue;
        IdxSet I = IdxSet(ka.I | kb.I), J = IdxSet(ka.J | kb.J);
        int av = std::countr_zero(unsigned(IdxSet(full & ~I)));
        int bv = std::countr_zero(unsigned(IdxSet(full & ~J)));
        int sgn = merge_sign(ka.I, kb.I) * merge_sign(ka.J, kb.J);
        sgn = -sgn;  // dz_{I2} crosses dzbar_{J1}, both singletons
        sgn *= merge_sign(I, IdxSet(1u << av)) * merge_sign(J, IdxSet(1u << bv));
        // dz_a crosses dzbar_J with |J| = 2: even, no extra sign
        GaussRat v = sphere_bilinear(ca.num, cb.num, MultiIndex::unit(3, bv), MultiIndex::unit(3, av));
        v *= GaussRat::imag_unit();
        if (sgn < 0) v = -v;
        acc += v;
      }
    }
    acc /= td.unit_coeff;
    require(acc.is_real(), Errc::Internal, "wedge_pair must be real");
    return acc.re;
  }

  int n_;
};

// ---------------------------------------------------------------------------
// Tangent bases at the Fubini-Study point.
// ---------------------------------------------------------------------------
struct Direction {
  QForm eta;
  bool is_gauduchon_dir = false;
  bool is_kahler_dir = false;
};

struct TangentBasis {
  enum class Kind { Gauduchon, Kahler };
  Kind kind;
  int n = 0;
  int degree = 0;
  std::vector<Direction> directions;
  QMat coords;  // columns: coordinates in the DirectionSpace
  QMat gram;    // exact L2(fs) Gram matrix

  int dim() const { return int(directions.size()); }
};

namespace detail {

inline TangentBasis cut_basis(int n, int d, TangentBasis::Kind kind) {
  DirectionSpace ds = DirectionSpace::create(n, d);
  std::vector<QForm> horiz_images, cond_images;
  horiz_images.reserve(size_t(ds.dim()));
  cond_images.reserve(size_t(ds.dim()));
  const QForm& wn2 = QForm::fs_power(n, n - 2);
  for (int r = 0; r < ds.dim(); ++r) {
    QForm e = ds.basis_form(r);
    horiz_images.push_back(e.euler_contraction(false));
    if (kind == TangentBasis::Kind::Gauduchon)
      cond_images.push_back(e.wedge(wn2).dc().exterior_d());
    else
      cond_images.push_back(e.exterior_d());
  }
  QMat sys = vstack(linearize_images(horiz_images), linearize_images(cond_images));
  QMat ns = nullspace(std::move(sys));
  require(ns.cols > 0, Errc::EmptyBasis, "no tangent directions at this degree");
  TangentBasis tb;
  tb.kind = kind;
  tb.n = n;
  tb.degree = d;
  tb.coords = ns;
  FsPairing pairing(n);
  std::vector<FsPairing::FormData> data;
  for (int c = 0; c < ns.cols; ++c) {
    auto x = std::vector<mpq_class>(size_t(ns.rows));
    for (int r = 0; r < ns.rows; ++r) x[size_t(r)] = ns.at(r, c);
    Direction dir;
    dir.eta = ds.materialize(x);
    dir.is_kahler_dir = dir.eta.exterior_d().reduced().is_zero();
    dir.is_gauduchon_dir = kind == TangentBasis::Kind::Gauduchon
                               ? true
                               : dir.eta.wedge(wn2).dc().exterior_d().reduced().is_zero();
    data.push_back(pairing.analyze(dir.eta));
    tb.directions.push_back(std::move(dir));
  }
  int m = tb.dim();
  tb.gram = QMat(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      mpq_class v = pairing.l2_pair(data[size_t(i)], data[size_t(j)], tb.directions[size_t(i)].eta,
                                    tb.directions[size_t(j)].eta);
      tb.gram.at(i, j) = v;
      tb.gram.at(j, i) = v;
    }
  require(rank(tb.gram) == m, Errc::SingularGram, "tangent basis is L2-degenerate");
  return tb;
}

}  // namespace detail

// Solutions of dd^c(eta ^ fs^{n-2}) = 0 in the degree-(d,d) space.
inline TangentBasis gauduchon_tangent_basis(int n, int d) {
  return detail::cut_basis(n, d, TangentBasis::Kind::Gauduchon);
}

// d-closed directions: tangent to Kaehler metrics at fs.
inline TangentBasis kahler_tangent_basis(int n, int d) {
  return detail::cut_basis(n, d, TangentBasis::Kind::Kahler);
}

// The real function basis of scale-invariant functions with numerator
// bidegree (s,s)/|z|^{2s}.
inline std::vector<QForm> real_function_basis(int n, int s) {
  int nv = n + 1;
  std::vector<TermKey> monos;
  DirectionSpace::enumerate_monomials(nv, s, monos);
  std::vector<QForm> out;
  for (const TermKey& m : monos) {
    if (m.beta < m.alpha) continue;
    if (m.alpha == m.beta) {
      out.push_back(QForm::function(QPoly::monomial(nv, m.alpha, m.beta, GaussRat(1)), s));
    } else {
      QPoly re = QPoly::monomial(nv, m.alpha, m.beta, GaussRat(1)) +
                 QPoly::monomial(nv, m.beta, m.alpha, GaussRat(1));
      QPoly im = QPoly::monomial(nv, m.alpha, m.beta, GaussRat::imag_unit()) +
                 QPoly::monomial(nv, m.beta, m.alpha, -GaussRat::imag_unit());
      out.push_back(QForm::function(re, s));
      out.push_back(QForm::function(im, s));
    }
  }
  return out;
}

// Rank evidence that the d-closed truncated directions are exactly
// span{fs} + dd^c(functions): returns {closed_dim, generated_dim}. A
// candidate dd^c(u) enters only if it lies in the degree-(d,d) space after
// exact |z|^2 cancellation; the caller flags any closed direction outside
// the generated span.
inline std::pair<int, int> kahler_representability(int n, int d) {
  TangentBasis kb = kahler_tangent_basis(n, d);
  DirectionSpace ds = DirectionSpace::create(n, d);
  std::vector<std::vector<mpq_class>> cols;
  cols.push_back(ds.coordinates_of(QForm::fubini_study(n)));
  for (int s = 0; s <= d; ++s)
    for (const QForm& u : real_function_basis(n, s)) {
      QForm img = u.dc().exterior_d().reduced();
      if (img.is_zero()) continue;
      try {
        cols.push_back(ds.coordinates_of(img));
      } catch (const Error&) {
        // dd^c(u) does not reduce into the truncation; not a generator here
      }
    }
  QMat m(ds.dim(), int(cols.size()));
  for (size_t c = 0; c < cols.size(); ++c)
    for (int r = 0; r < ds.dim(); ++r) m.at(r, int(c)) = cols[c][size_t(r)];
  return {kb.dim(), rank(m)};
}

// ---------------------------------------------------------------------------
// Variational formulas.
// ---------------------------------------------------------------------------

// Exact bracket of the first variation of M_sigma at g along eta:
//   dM_sigma = Vol^{-(n-1)/n} * [ A'  -  ((n-1)/n) A V'/V ],   all bracket
// integrals exact. The value is zero iff the bracket is.
struct MSigmaVariation {
  mpq_class bracket;
  double value = 0;
};

inline MSigmaVariation first_variation_m_sigma(const HermitianMetric& g, const QForm& eta,
                                               const ProjPoint<GaussRat>& sigma) {
  int n = g.n();
  mpq_class aprime = eta.wedge(g.omega_power(n - 2)).integrate_equator(sigma);
  aprime /= factorial_z(unsigned(n - 2));
  mpq_class a = g.area_equator_exact(sigma);
  mpq_class vprime = eta.wedge(g.omega_power(n - 1)).integrate_cpn();
  vprime /= factorial_z(unsigned(n - 1));
  mpq_class v = g.volume_exact();
  MSigmaVariation out;
  out.bracket = aprime - mpq_class(n - 1) / mpq_class(n) * a * vprime / v;
  out.value = out.bracket.get_d() / g.volume_normalizer();
  return out;
}

inline double first_variation_m_sigma(const HermitianMetric& g, const QForm& eta,
                                      const ProjPoint<CD>& sigma) {
  int n = g.n();
  FForm eta_f = eta.to_float();
  double aprime = eta_f.wedge(g.omega_float_power(n - 2)).integrate_equator(sigma) /
                  factorial_z(unsigned(n - 2)).get_d();
  double a = g.area_equator(sigma);
  mpq_class vprime_q = eta.wedge(g.omega_power(n - 1)).integrate_cpn();
  double vprime = vprime_q.get_d() / factorial_z(unsigned(n - 1)).get_d();
  double v = g.volume();
  return (aprime - double(n - 1) / n * a * vprime / v) / g.volume_normalizer();
}

// First variation of the mean functional; bracket is exact and vanishes iff
// the derivative does.
struct MeanVariation {
  mpq_class bracket;  // Int eta^w^{n-2}^fs - (Imix/Ivol) Int eta^w^{n-1}
  double value = 0;
};

inline MeanVariation first_variation_mean(const HermitianMetric& g, const QForm& eta) {
  int n = g.n();
  mpq_class t1 = eta.wedge(g.omega_power(n - 2)).wedge(QForm::fubini_study(n)).integrate_cpn();
  mpq_class t2 = eta.wedge(g.omega_power(n - 1)).integrate_cpn();
  mpq_class imix = g.mixed_integral_exact();
  mpq_class ivol = g.volume_exact() * factorial_z(unsigned(n));
  MeanVariation out;
  out.bracket = t1 - imix / ivol * t2;
  double nf = factorial_z(unsigned(n)).get_d();
  double c = std::pow(nf, double(n - 1) / n) / factorial_z(unsigned(n - 2)).get_d();
  out.value = c * std::pow(ivol.get_d(), -double(n - 1) / n) * out.bracket.get_d();
  return out;
}

// Q_omega(eta, xi) at a normalized Kaehler form.
inline mpq_class q_form(const QForm& omega, const QForm& eta, const QForm& xi) {
  int n = omega.n();
  require(omega.exterior_d().reduced().is_zero(), Errc::NotKahler, "q_form needs a Kaehler form");
  require(omega.wedge_pow(n).integrate_cpn() == 1, Errc::NotNormalized,
          "q_form needs Int omega^n = 1");
  mpq_class a = eta.wedge(omega.wedge_pow(n - 1)).integrate_cpn();
  mpq_class b = xi.wedge(omega.wedge_pow(n - 1)).integrate_cpn();
  mpq_class w = eta.wedge(xi).wedge(omega.wedge_pow(n - 2)).integrate_cpn();
  return a * b - w;
}

// Second variation of the mean functional along a Gauduchon direction at a
// normalized Gauduchon base form, assembled from exact wedge integrals.
struct SecondVariation {
  mpq_class bracket;
  double value = 0;
};

inline SecondVariation second_variation_mean(const QForm& omega, const QForm& eta) {
  int n = omega.n();
  require(omega.wedge_pow(n).integrate_cpn() == 1, Errc::NotNormalized,
          "second variation needs Int omega^n = 1");
  require(eta.wedge(omega.wedge_pow(n - 2)).dc().exterior_d().reduced().is_zero(),
          Errc::NotGauduchonDirection, "eta is not a Gauduchon direction at omega");
  QForm mu = eta.wedge(omega.wedge_pow(n - 2)).scaled(GaussRat(n - 1));
  mpq_class i1 = omega.wedge_pow(n - 1).wedge(QForm::fubini_study(n)).integrate_cpn();
  mpq_class i2 = mu.wedge(omega).integrate_cpn();
  mpq_class i3 = mu.wedge(eta).integrate_cpn();
  mpq_class i4 = mu.wedge(QForm::fubini_study(n)).integrate_cpn();
  SecondVariation out;
  out.bracket = i1 * (i2 * i2 / mpq_class(n - 1) - i3) + 2 * i2 * (i1 * i2 - i4);
  double nf = factorial_z(unsigned(n)).get_d();
  out.value = std::pow(nf, double(n - 1) / n) / factorial_z(unsigned(n - 1)).get_d() *
              out.bracket.get_d();
  return out;
}

// ---------------------------------------------------------------------------
// Metric paths omega + t eta with exact t-polynomial integrals, used by the
// finite-difference oracles and the descent/growth experiments.
// ---------------------------------------------------------------------------
class MetricPath {
 public:
  MetricPath(QForm base, QForm dir) : omega_(std::move(base)), eta_(std::move(dir)) {
    n_ = omega_.n();
    for (int k = 0; k <= n_; ++k) {
      QForm w = binomial_term(k, n_);
      vol_poly_.push_back(w.integrate_cpn());
    }
    for (int k = 0; k <= n_ - 1; ++k)
      mix_poly_.push_back(binomial_term(k, n_ - 1).wedge(QForm::fubini_study(n_)).integrate_cpn());
  }

  int n() const { return n_; }
  const QForm& base() const { return omega_; }
  const QForm& direction() const { return eta_; }

  // Exact coefficients of t -> Int_Sigma (omega + t eta)^{n-1} at a rational sigma.
  std::vector<mpq_class> area_poly(const ProjPoint<GaussRat>& sigma) const {
    std::vector<mpq_class> c;
    for (int k = 0; k <= n_ - 1; ++k) c.push_back(binomial_term(k, n_ - 1).integrate_equator(sigma));
    return c;
  }
  std::vector<double> area_poly(const ProjPoint<CD>& sigma) const {
    std::vector<double> c;
    FForm of = omega_.to_float(), ef = eta_.to_float();
    for (int k = 0; k <= n_ - 1; ++k) {
      FForm term = FForm::constant_fn(n_ + 1, CD(binom(n_ - 1, k), 0));
      for (int t = 0; t < n_ - 1 - k; ++t) term = term.wedge(of);
      for (int t = 0; t < k; ++t) term = term.wedge(ef);
      c.push_back(term.integrate_equator(sigma));
    }
    return c;
  }

  double vol_at(double t) const { return eval_poly(vol_poly_, t) / factorial_z(unsigned(n_)).get_d(); }
  double vol_int_at(double t) const { return eval_poly(vol_poly_, t); }
  double mix_at(double t) const { return eval_poly(mix_poly_, t); }

  double mean_at(double t) const {
    double nf = factorial_z(unsigned(n_)).get_d();
    double c = std::pow(nf, double(n_ - 1) / n_) / factorial_z(unsigned(n_ - 1)).get_d();
    return c * mix_at(t) / std::pow(vol_int_at(t), double(n_ - 1) / n_);
  }

  double m_sigma_at(double t, const std::vector<double>& area_coeffs) const {
    double a = eval_poly(area_coeffs, t) / factorial_z(unsigned(n_ - 1)).get_d();
    return a / std::pow(vol_at(t), double(n_ - 1) / n_);
  }

  // Exact check that the whole path stays Gauduchon (all t-coefficients of
  // dd^c((omega + t eta)^{n-1}) vanish identically).
  bool path_is_gauduchon() const {
    for (int k = 0; k <= n_ - 1; ++k)
      if (!binomial_term(k, n_ - 1).dc().exterior_d().reduced().is_zero()) return false;
    return true;
  }

  // Sampled positivity of omega + t eta.
  bool positive_at(double t, int samples = 64, uint64_t seed = 11) const {
    FForm w = omega_.to_float() + eta_.to_float().scaled(CD(t, 0));
    for (const auto& p : sample_sigma(n_, samples, seed))
      if (min_horizontal_eigenvalue(w, p) <= 0) return false;
    return true;
  }

  static double eval_poly(const std::vector<mpq_class>& c, double t) {
    double acc = 0;
    for (size_t k = c.size(); k-- > 0;) acc = acc * t + c[k].get_d();
    return acc;
  }
  static double eval_poly(const std::vector<double>& c, double t) {
    double acc = 0;
    for (size_t k = c.size(); k-- > 0;) acc = acc * t + c[k];
    return acc;
  }

 private:
  static double binom(int n, int k) {
    double r = 1;
    for (int j = 0; j < k; ++j) r = r * (n - j) / (j + 1);
    return r;
  }
  QForm binomial_term(int k, int total) const {
    // C(total,k) eta^k ^ omega^{total-k}
    mpz_class c = factorial_z(unsigned(total)) /
                  (factorial_z(unsigned(k)) * factorial_z(unsigned(total - k)));
    QForm term = QForm::constant_fn(n_ + 1, GaussRat(mpq_class(c)));
    for (int t = 0; t < total - k; ++t) term = term.wedge(omega_);
    for (int t = 0; t < k; ++t) term = term.wedge(eta_);
    return term;
  }

  int n_;
  QForm omega_, eta_;
  std::vector<mpq_class> vol_poly_, mix_poly_;
};

enum class PathFunctional { MSigma, Mean, Rho };

inline std::vector<CD> make_e0(int nv) {
  std::vector<CD> v(size_t(nv), CD(0, 0));
  v[0] = CD(1, 0);
  return v;
}

// Central finite differences along a metric path, with optional Richardson
// extrapolation. The Rho functional requires an exactly Gauduchon path.
inline double fd_oracle(const MetricPath& path, PathFunctional which, int order, double step,
                        bool richardson = false,
                        const std::optional<ProjPoint<CD>>& sigma = std::nullopt) {
  require(order == 1 || order == 2, Errc::ConfigInvalid, "fd order must be 1 or 2");
  require(step > 0, Errc::ConfigInvalid, "fd step must be positive");
  require(path.positive_at(2 * step) && path.positive_at(-2 * step), Errc::PositivityLost,
          "path leaves the positive cone within the stencil");
  std::vector<double> area;
  if (which == PathFunctional::MSigma) {
    require(sigma.has_value(), Errc::ConfigInvalid, "m_sigma oracle needs a sigma");
    area = path.area_poly(*sigma);
  } else if (which == PathFunctional::Rho) {
    require(path.path_is_gauduchon(), Errc::NotGauduchonDirection,
            "rho along a path needs the path to stay Gauduchon");
    area = path.area_poly(unit_point(make_e0(path.n() + 1)));
  }
  auto value = [&](double t) {
    switch (which) {
      case PathFunctional::Mean: return path.mean_at(t);
      case PathFunctional::MSigma: return path.m_sigma_at(t, area);
      case PathFunctional::Rho: return path.m_sigma_at(t, area);
    }
    return 0.0;
  };
  auto stencil = [&](double h) {
    if (order == 1) return (value(h) - value(-h)) / (2 * h);
    return (value(h) - 2 * value(0) + value(-h)) / (h * h);
  };
  double d1 = stencil(step);
  if (!richardson) return d1;
  double d2 = stencil(step / 2);
  return (4 * d2 - d1) / 3;  // cancels the O(h^2) error of the central stencil
}

// ---------------------------------------------------------------------------
// Hessian spectrum of the mean functional on the truncated Gauduchon tangent
// space against the exact L2 Gram.
// ---------------------------------------------------------------------------
struct HessianSpectrum {
  int basis_dim = 0;
  int kahler_dim = 0;
  int kernel_dim_exact = 0;
  int kernel_dim_numeric = 0;
  std::vector<double> eigenvalues;  // ascending, of the pencil (Q/(n-2)!, Gram)
};

inline HessianSpectrum hessian_spectrum(int n, int d, double kernel_tol = 1e-9) {
  TangentBasis gb = gauduchon_tangent_basis(n, d);
  TangentBasis kb = kahler_tangent_basis(n, d);
  FsPairing pairing(n);
  int m = gb.dim();
  std::vector<FsPairing::FormData> data;
  data.reserve(size_t(m));
  for (const auto& dir : gb.directions) data.push_back(pairing.analyze(dir.eta));
  QMat Q(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      mpq_class v = pairing.q_pair(data[size_t(i)], data[size_t(j)], gb.directions[size_t(i)].eta,
                                   gb.directions[size_t(j)].eta);
      v /= factorial_z(unsigned(n - 2));
      Q.at(i, j) = v;
      Q.at(j, i) = v;
    }
  HessianSpectrum hs;
  hs.basis_dim = m;
  hs.kahler_dim = kb.dim();
  hs.kernel_dim_exact = m - rank(Q);
  Eigen::MatrixXd Qd(m, m), Gd(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      Qd(i, j) = Q.at(i, j).get_d();
      Gd(i, j) = gb.gram.at(i, j).get_d();
    }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Qd, Gd);
  require(es.info() == Eigen::Success, Errc::SingularGram, "generalized eigensolve failed");
  hs.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + m);
  double lmax = 0;
  for (double l : hs.eigenvalues) lmax = std::max(lmax, std::abs(l));
  for (double l : hs.eigenvalues)
    if (std::abs(l) <= kernel_tol * std::max(lmax, 1.0)) ++hs.kernel_dim_numeric;
  return hs;
}

}  // namespace cpsys
