#pragma once

#include <algorithm>
#include <bit>
#include <map>
#include <vector>

#include "cpsys/ambient.hpp"
#include "cpsys/bihom_poly.hpp"

namespace cpsys {

// Index tuples are bitmasks over the ambient variables (ascending order).
using IdxSet = uint8_t;

inline int set_size(IdxSet s) { return std::popcount(unsigned(s)); }
inline bool set_has(IdxSet s, int j) { return (s >> j) & 1; }
// Position of j inside the ascending tuple s.
inline int set_pos(IdxSet s, int j) { return std::popcount(unsigned(s & ((1u << j) - 1u))); }
// Sign of sorting the concatenation [A, B] of two disjoint ascending tuples.
inline int merge_sign(IdxSet a, IdxSet b) {
  int inv = 0;
  for (int j = 0; j < 8; ++j)
    if (set_has(b, j)) inv += std::popcount(unsigned(a) >> (j + 1));
  return (inv & 1) ? -1 : 1;
}

// Component key of dz_I wedge dzbar_J.
struct FormKey {
  IdxSet I = 0, J = 0;
  auto operator<=>(const FormKey&) const = default;
  int p() const { return set_size(I); }
  int q() const { return set_size(J); }
};

// A differential form on C^{n+1} \ {0} with components
//   num / |z|^{2 den_pow} dz_I wedge dzbar_J.
// The geometric objects of interest are U(1)-invariant and horizontal; those
// properties are checkable invariants, not structural assumptions.
template <class S>
class PolyForm {
 public:
  using Ops = ScalarOps<S>;
  struct Comp {
    BihomPoly<S> num;
    int den_pow = 0;
  };
  // Scale-invariant function P / |z|^{2s}, also used for top-form ratios.
  struct Ratio {
    BihomPoly<S> num;
    int den_pow = 0;
  };

  PolyForm() = default;
  PolyForm(int nvars, int degree) : nv_(nvars), deg_(degree) {}

  static PolyForm zero(int nvars, int degree) { return PolyForm(nvars, degree); }

  // Degree-0 form from a function numerator/|z|^{2 den}.
  static PolyForm function(BihomPoly<S> num, int den_pow) {
    PolyForm f(num.nvars(), 0);
    f.add_component(FormKey{0, 0}, std::move(num), den_pow);
    return f;
  }
  static PolyForm constant_fn(int nvars, S c) {
    return function(BihomPoly<S>::constant(nvars, std::move(c)), 0);
  }

  int nvars() const { return nv_; }
  int n() const { return nv_ - 1; }
  int degree() const { return deg_; }
  bool is_zero() const { return comps_.empty(); }
  const std::map<FormKey, Comp>& components() const { return comps_; }

  void add_component(FormKey key, BihomPoly<S> num, int den_pow) {
    require(set_size(key.I) + set_size(key.J) == deg_, Errc::MalformedForm,
            "component degree mismatch");
    if (num.is_zero()) return;
    auto it = comps_.find(key);
    if (it == comps_.end()) {
      comps_.emplace(key, Comp{std::move(num), den_pow});
      return;
    }
    Comp& c = it->second;
    int m = std::max(c.den_pow, den_pow);
    BihomPoly<S> merged = c.num.mul_norm_pow(m - c.den_pow) + num.mul_norm_pow(m - den_pow);
    if (merged.is_zero())
      comps_.erase(it);
    else
      c = Comp{std::move(merged), m};
  }

  // Cancel |z|^2 factors shared by numerator and denominator, drop zeros.
  PolyForm reduced() const {
    PolyForm r(nv_, deg_);
    for (const auto& [k, c] : comps_) {
      if (c.num.is_zero()) continue;
      BihomPoly<S> num = c.num;
      int m = c.den_pow;
      while (m > 0) {
        auto q = num.div_norm_pow(1);
        if (!q) break;
        num = std::move(*q);
        --m;
      }
      if (!num.is_zero()) r.comps_.emplace(k, Comp{std::move(num), m});
    }
    return r;
  }

  PolyForm& operator+=(const PolyForm& o) {
    if (o.is_zero()) return *this;
    if (is_zero() && deg_ != o.deg_ && comps_.empty()) {
      // adopt the other's degree when we are a default zero
      require(nv_ == o.nv_ || nv_ == 0, Errc::MalformedForm, "variable count mismatch in add");
    }
    require(nv_ == o.nv_, Errc::MalformedForm, "variable count mismatch in add");
    require(deg_ == o.deg_, Errc::MalformedForm, "degree mismatch in add");
    for (const auto& [k, c] : o.comps_) add_component(k, c.num, c.den_pow);
    return *this;
  }
  friend PolyForm operator+(PolyForm a, const PolyForm& b) { return a += b; }
  friend PolyForm operator-(PolyForm a, const PolyForm& b) { return a += b.scaled(-ScalarOps<S>::one()); }

  PolyForm scaled(const S& c) const {
    PolyForm r(nv_, deg_);
    if (Ops::is_zero(c)) return r;
    for (const auto& [k, comp] : comps_) r.comps_.emplace(k, Comp{comp.num.scaled(c), comp.den_pow});
    return r;
  }

  // Multiply by a scale-invariant function.
  PolyForm scaled_by_function(const Ratio& f) const {
    PolyForm r(nv_, deg_);
    if (f.num.is_zero()) return r;
    for (const auto& [k, comp] : comps_)
      r.add_component(k, comp.num * f.num, comp.den_pow + f.den_pow);
    return r;
  }

  PolyForm conjugate() const {
    PolyForm r(nv_, deg_);
    for (const auto& [k, comp] : comps_) {
      int sign_flips = set_size(k.I) * set_size(k.J);
      BihomPoly<S> num = comp.num.conjugate();
      if (sign_flips & 1) num = -num;
      r.add_component(FormKey{k.J, k.I}, std::move(num), comp.den_pow);
    }
    return r;
  }
  bool is_real() const { return (*this - conjugate()).reduced().is_zero(); }

  friend bool operator==(const PolyForm& a, const PolyForm& b) {
    if (a.nv_ != b.nv_ || a.deg_ != b.deg_) return false;
    return (a - b).reduced().is_zero();
  }

  PolyForm wedge(const PolyForm& o) const {
    require(nv_ == o.nv_, Errc::MalformedForm, "variable count mismatch in wedge");
    require(deg_ + o.deg_ <= 2 * nv_, Errc::DegreeOverflow,
            "wedge degree " + std::to_string(deg_ + o.deg_) + " exceeds ambient top " +
                std::to_string(2 * nv_));
    PolyForm r(nv_, deg_ + o.deg_);
    for (const auto& [k1, c1] : comps_)
      for (const auto& [k2, c2] : o.comps_) {
        if (k1.I & k2.I) continue;
        if (k1.J & k2.J) continue;
        int sgn = merge_sign(k1.I, k2.I) * merge_sign(k1.J, k2.J);
        if ((set_size(k2.I) * set_size(k1.J)) & 1) sgn = -sgn;
        BihomPoly<S> num = c1.num * c2.num;
        if (sgn < 0) num = -num;
        r.add_component(FormKey{IdxSet(k1.I | k2.I), IdxSet(k1.J | k2.J)}, std::move(num),
                        c1.den_pow + c2.den_pow);
      }
    return r;
  }

  PolyForm wedge_pow(int k) const {
    PolyForm r = constant_fn(nv_, Ops::one());
    for (int t = 0; t < k; ++t) r = r.wedge(*this);
    return r;
  }

  PolyForm exterior_d() const {
    PolyForm r(nv_, deg_ + 1);
    for (const auto& [k, comp] : comps_) {
      for (int j = 0; j < nv_; ++j) {
        // d/dz_j part -> dz_j ^ dz_I ^ dzbar_J
        if (!set_has(k.I, j)) {
          BihomPoly<S> dnum = comp.num.wirtinger(j, BihomPoly<S>::WirtKind::Holomorphic);
          BihomPoly<S> num;
          int den;
          if (comp.den_pow == 0) {
            num = std::move(dnum);
            den = 0;
          } else {
            BihomPoly<S> zbar = BihomPoly<S>::monomial(nv_, MultiIndex(nv_), MultiIndex::unit(nv_, j),
                                                       Ops::from_long(comp.den_pow));
            num = dnum.mul_norm_pow(1) - comp.num * zbar;
            den = comp.den_pow + 1;
          }
          if (!num.is_zero()) {
            int sgn = merge_sign(IdxSet(1u << j), k.I);
            if (sgn < 0) num = -num;
            r.add_component(FormKey{IdxSet(k.I | (1u << j)), k.J}, std::move(num), den);
          }
        }
        // d/dzbar_j part -> dzbar_j has to cross dz_I.
        if (!set_has(k.J, j)) {
          BihomPoly<S> dnum = comp.num.wirtinger(j, BihomPoly<S>::WirtKind::Antiholomorphic);
          BihomPoly<S> num;
          int den;
          if (comp.den_pow == 0) {
            num = std::move(dnum);
            den = 0;
          } else {
            BihomPoly<S> zj = BihomPoly<S>::monomial(nv_, MultiIndex::unit(nv_, j), MultiIndex(nv_),
                                                     Ops::from_long(comp.den_pow));
            num = dnum.mul_norm_pow(1) - comp.num * zj;
            den = comp.den_pow + 1;
          }
          if (!num.is_zero()) {
            int sgn = merge_sign(IdxSet(1u << j), k.J);
            if (set_size(k.I) & 1) sgn = -sgn;
            if (sgn < 0) num = -num;
            r.add_component(FormKey{k.I, IdxSet(k.J | (1u << j))}, std::move(num), den);
          }
        }
      }
    }
    return r;
  }

  // J acts on a (p,q) component as multiplication by i^{q-p}.
  PolyForm j_action(bool inverse = false) const {
    PolyForm r(nv_, deg_);
    for (const auto& [k, comp] : comps_) {
      int e = set_size(k.J) - set_size(k.I);
      if (inverse) e = -e;
      r.comps_.emplace(k, Comp{comp.num.scaled(Ops::i_pow(e)), comp.den_pow});
    }
    return r;
  }

  // d^c = J^{-1} d J with the i^{q-p} convention for J.
  PolyForm dc() const { return j_action().exterior_d().j_action(/*inverse=*/true); }

  // Interior product with the Euler field (anti=false) or its conjugate.
  PolyForm euler_contraction(bool anti) const {
    PolyForm r(nv_, deg_ - 1);
    for (const auto& [k, comp] : comps_) {
      if (!anti) {
        for (int j = 0; j < nv_; ++j) {
          if (!set_has(k.I, j)) continue;
          BihomPoly<S> zj = BihomPoly<S>::monomial(nv_, MultiIndex::unit(nv_, j), MultiIndex(nv_), Ops::one());
          BihomPoly<S> num = comp.num * zj;
          if (set_pos(k.I, j) & 1) num = -num;
          r.add_component(FormKey{IdxSet(k.I & ~(1u << j)), k.J}, std::move(num), comp.den_pow);
        }
      } else {
        for (int j = 0; j < nv_; ++j) {
          if (!set_has(k.J, j)) continue;
          BihomPoly<S> zbj = BihomPoly<S>::monomial(nv_, MultiIndex(nv_), MultiIndex::unit(nv_, j), Ops::one());
          BihomPoly<S> num = comp.num * zbj;
          if ((set_size(k.I) + set_pos(k.J, j)) & 1) num = -num;
          r.add_component(FormKey{k.I, IdxSet(k.J & ~(1u << j))}, std::move(num), comp.den_pow);
        }
      }
    }
    return r;
  }

  bool is_horizontal() const {
    return euler_contraction(false).reduced().is_zero() && euler_contraction(true).reduced().is_zero();
  }
  bool is_scale_invariant() const {
    for (const auto& [k, comp] : comps_) {
      if (comp.num.is_zero()) continue;
      if (comp.num.adeg() + set_size(k.I) != comp.den_pow) return false;
      if (comp.num.bdeg() + set_size(k.J) != comp.den_pow) return false;
    }
    return true;
  }
  void validate(bool require_real = false) const {
    require(is_scale_invariant(), Errc::MalformedForm, "form is not scale invariant");
    require(is_horizontal(), Errc::NonHorizontalResult, "form is not horizontal");
    if (require_real) require(is_real(), Errc::MalformedForm, "form is not real");
  }

  // The U(n+1)-invariant Kaehler form with integrate_cpn(fs^n) = 1 exactly.
  static const PolyForm& fubini_study(int n) {
    static std::map<int, PolyForm> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    require(n >= 1, Errc::DimensionTooSmall, "fubini_study needs n >= 1");
    int nv = n + 1;
    PolyForm w(nv, 2);
    BihomPoly<S> ns = BihomPoly<S>::norm_sq(nv);
    for (int j = 0; j < nv; ++j)
      for (int k = 0; k < nv; ++k) {
        // i (delta_jk |z|^2 - zbar_j z_k) / |z|^4
        BihomPoly<S> num(nv, 1, 1);
        if (j == k) num += ns;
        num -= BihomPoly<S>::monomial(nv, MultiIndex::unit(nv, k), MultiIndex::unit(nv, j), Ops::one());
        num = num.scaled(Ops::i_unit());
        if (!num.is_zero()) w.add_component(FormKey{IdxSet(1u << j), IdxSet(1u << k)}, std::move(num), 2);
      }
    return cache.emplace(n, std::move(w)).first->second;
  }

  static const PolyForm& fs_power(int n, int k) {
    static std::map<std::pair<int, int>, PolyForm> cache;
    auto key = std::make_pair(n, k);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    return cache.emplace(key, fubini_study(n).wedge_pow(k)).first->second;
  }

  // i d|z|^2 ^ dbar|z|^2: the vertical completion used to read off top-form
  // ratios without polynomial division.
  static const PolyForm& vertical_form(int nv) {
    static std::map<int, PolyForm> cache;
    auto it = cache.find(nv);
    if (it != cache.end()) return it->second;
    PolyForm v(nv, 2);
    for (int j = 0; j < nv; ++j)
      for (int k = 0; k < nv; ++k) {
        BihomPoly<S> num = BihomPoly<S>::monomial(nv, MultiIndex::unit(nv, k), MultiIndex::unit(nv, j),
                                                  Ops::i_unit());
        v.add_component(FormKey{IdxSet(1u << j), IdxSet(1u << k)}, std::move(num), 0);
      }
    return cache.emplace(nv, std::move(v)).first->second;
  }

  // Coefficient of (this ^ vertical) on the full ambient key, merged.
  Comp top_vertical_coeff() const {
    require(deg_ == 2 * n(), Errc::MalformedForm, "top_vertical_coeff needs a top-degree form");
    IdxSet full = IdxSet((1u << nv_) - 1u);
    Comp out;
    out.num = BihomPoly<S>(nv_, 0, 0);
    bool first = true;
    for (const auto& [k, comp] : comps_) {
      if (set_size(k.I) != n() || set_size(k.J) != n()) continue;
      int a = std::countr_zero(unsigned(IdxSet(full & ~k.I)));
      int b = std::countr_zero(unsigned(IdxSet(full & ~k.J)));
      // (dz_I dzbar_J) ^ (dz_a dzbar_b), vertical coefficient i zbar_a z_b.
      int sgn = merge_sign(k.I, IdxSet(1u << a)) * merge_sign(k.J, IdxSet(1u << b));
      if ((1 * set_size(k.J)) & 1) sgn = -sgn;  // dz_a crosses dzbar_J
      BihomPoly<S> mono = BihomPoly<S>::monomial(nv_, MultiIndex::unit(nv_, b), MultiIndex::unit(nv_, a),
                                                 Ops::i_unit());
      BihomPoly<S> add = comp.num * mono;
      if (sgn < 0) add = -add;
      if (first) {
        out.num = std::move(add);
        out.den_pow = comp.den_pow;
        first = false;
      } else {
        int m = std::max(out.den_pow, comp.den_pow);
        out.num = out.num.mul_norm_pow(m - out.den_pow) + add.mul_norm_pow(m - comp.den_pow);
        out.den_pow = m;
      }
    }
    return out;
  }

  struct TopData {
    S unit_coeff;   // r with fs^n ^ vertical = r |z|^{2t} / |z|^{2D}
    int num_pow;    // t
    int den_pow;    // D
  };
  static const TopData& fs_top_data(int n) {
    static std::map<int, TopData> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    Comp c = fs_power(n, n).top_vertical_coeff();
    int t = c.num.adeg();
    require(c.num.adeg() == c.num.bdeg(), Errc::Internal, "fs top coefficient not balanced");
    MultiIndex probe(n + 1);
    probe[0] = uint8_t(t);
    auto itt = c.num.terms().find(TermKey{probe, probe});
    require(itt != c.num.terms().end(), Errc::Internal, "fs top coefficient missing diagonal term");
    S r = itt->second;
    require((c.num - BihomPoly<S>::norm_sq(n + 1).mul_norm_pow(t - 1).scaled(r)).is_zero(), Errc::Internal,
            "fs top coefficient is not a multiple of |z|^{2t}");
    return cache.emplace(n, TopData{r, t, c.den_pow}).first->second;
  }

  // Exact ratio phi with this == phi * fs^n, verified componentwise.
  Ratio top_ratio() const {
    int nn = n();
    if (is_zero()) return Ratio{BihomPoly<S>(nv_, 0, 0), 0};
    const TopData& td = fs_top_data(nn);
    Comp c = top_vertical_coeff();
    require(!c.num.is_zero(), Errc::NotProportional, "no top component against the ambient volume");
    BihomPoly<S> P = c.num.scaled(Ops::one() / td.unit_coeff);
    int s = c.den_pow + td.num_pow - td.den_pow;
    if (s < 0) {
      P = P.mul_norm_pow(-s);
      s = 0;
    }
    Ratio phi{std::move(P), s};
    PolyForm recon = fs_power(nn, nn).scaled_by_function(phi);
    require((*this - recon).reduced().is_zero(), Errc::NotProportional,
            "form is not proportional to fs^n (non-horizontal input?)");
    return phi;
  }

  // Integral over CP^n of a top-degree form. Defined through the sphere
  // probability measure; exact in rational mode. Assumes a horizontal input
  // (all library constructions are); use top_ratio() for the verified path.
  S integrate_cpn_c() const {
    require(deg_ == 2 * n(), Errc::MalformedForm, "integrate_cpn needs a top-degree form");
    if (is_zero()) return Ops::zero();
    const TopData& td = fs_top_data(n());
    Comp c = top_vertical_coeff();
    return c.num.sphere_integral_c() / td.unit_coeff;
  }
  typename Ops::Real integrate_cpn() const {
    S v = integrate_cpn_c();
    if constexpr (std::is_same_v<S, GaussRat>) {
      require(v.is_real(), Errc::Internal, "integrate_cpn: non-real integral of a real form");
      return v.re;
    } else {
      return v.real();
    }
  }

  // Pullback along the linear map w -> M w (columns of M orthonormal so that
  // |z|^2 pulls back to |w|^2). M is nv x nw.
  PolyForm pullback_linear(const Mat<S>& M) const {
    require(M.rows == nv_, Errc::Internal, "pullback matrix row mismatch");
    int nw = M.cols;
    PolyForm r(nw, deg_);
    auto rows = std::vector<std::vector<S>>(size_t(nv_), std::vector<S>(size_t(nw)));
    for (int i = 0; i < nv_; ++i)
      for (int k = 0; k < nw; ++k) rows[size_t(i)][size_t(k)] = M.at(i, k);
    // Enumerate ascending subsets of the w-indices by mask.
    auto minor_det = [&](IdxSet rowsI, IdxSet colsK) -> S {
      std::vector<int> ri, ci;
      for (int j = 0; j < nv_; ++j)
        if (set_has(rowsI, j)) ri.push_back(j);
      for (int k = 0; k < nw; ++k)
        if (set_has(colsK, k)) ci.push_back(k);
      size_t m = ri.size();
      // Laplace expansion; m <= 3 in practice.
      std::vector<int> perm(m);
      for (size_t t = 0; t < m; ++t) perm[t] = int(t);
      S det = Ops::zero();
      do {
        int inv = 0;
        for (size_t x = 0; x < m; ++x)
          for (size_t y = x + 1; y < m; ++y)
            if (perm[x] > perm[y]) ++inv;
        S prod = Ops::one();
        for (size_t t = 0; t < m; ++t) prod *= M.at(ri[t], ci[size_t(perm[t])]);
        det += (inv & 1) ? -prod : prod;
      } while (std::next_permutation(perm.begin(), perm.end()));
      return det;
    };
    for (const auto& [k, comp] : comps_) {
      BihomPoly<S> num = comp.num.substitute_linear(rows);
      if (num.is_zero()) continue;
      int p = set_size(k.I), q = set_size(k.J);
      for (IdxSet K = 0; K < (1u << nw); ++K) {
        if (set_size(K) != p) continue;
        S dk = minor_det(k.I, K);
        if (Ops::is_zero(dk)) continue;
        for (IdxSet L = 0; L < (1u << nw); ++L) {
          if (set_size(L) != q) continue;
          S dl = Ops::conj(minor_det(k.J, L));
          if (Ops::is_zero(dl)) continue;
          r.add_component(FormKey{K, L}, num.scaled(dk * dl), comp.den_pow);
        }
      }
    }
    return r;
  }

  // Pullback by the unitary substitution z = U w.
  PolyForm unitary_pullback(const Mat<S>& U) const {
    // Monomial unitaries (one entry per row) admit a direct key remap.
    auto perm = std::vector<int>(size_t(nv_), -1);
    auto phase = std::vector<S>(size_t(nv_));
    bool monomial = true;
    for (int i = 0; i < nv_ && monomial; ++i) {
      for (int j = 0; j < nv_; ++j) {
        if (Ops::is_zero(U.at(i, j))) continue;
        if (perm[size_t(i)] >= 0) {
          monomial = false;
          break;
        }
        perm[size_t(i)] = j;
        phase[size_t(i)] = U.at(i, j);
      }
      if (perm[size_t(i)] < 0) monomial = false;
    }
    if (!monomial) return pullback_linear(U);
    // z_i = phase_i w_{perm(i)}
    PolyForm r(nv_, deg_);
    for (const auto& [k, comp] : comps_) {
      IdxSet I = 0, J = 0;
      int sgn = 1;
      S coeff = Ops::one();
      {
        std::vector<int> img;
        for (int j = 0; j < nv_; ++j)
          if (set_has(k.I, j)) {
            img.push_back(perm[size_t(j)]);
            coeff *= phase[size_t(j)];
          }
        sgn *= perm_sort_sign(img);
        for (int v : img) I |= IdxSet(1u << v);
      }
      {
        std::vector<int> img;
        for (int j = 0; j < nv_; ++j)
          if (set_has(k.J, j)) {
            img.push_back(perm[size_t(j)]);
            coeff *= Ops::conj(phase[size_t(j)]);
          }
        sgn *= perm_sort_sign(img);
        for (int v : img) J |= IdxSet(1u << v);
      }
      BihomPoly<S> num(nv_, comp.num.adeg(), comp.num.bdeg());
      for (const auto& [tk, c] : comp.num.terms()) {
        MultiIndex a(nv_), b(nv_);
        S tc = c * coeff;
        for (int j = 0; j < nv_; ++j) {
          a[perm[size_t(j)]] = tk.alpha[j];
          b[perm[size_t(j)]] = tk.beta[j];
          for (int e = 0; e < tk.alpha[j]; ++e) tc *= phase[size_t(j)];
          for (int e = 0; e < tk.beta[j]; ++e) tc *= Ops::conj(phase[size_t(j)]);
        }
        num.add_term(TermKey{a, b}, tc);
      }
      if (sgn < 0) num = -num;
      r.add_component(FormKey{I, J}, std::move(num), comp.den_pow);
    }
    return r;
  }

  static int perm_sort_sign(const std::vector<int>& v) {
    int inv = 0;
    for (size_t a = 0; a < v.size(); ++a)
      for (size_t b = a + 1; b < v.size(); ++b)
        if (v[a] > v[b]) ++inv;
    return (inv & 1) ? -1 : 1;
  }

  // Restriction to the equator orthogonal to sigma, as a form on CP^{n-1}.
  PolyForm equator_pullback(const ProjPoint<S>& sigma) const {
    require(n() >= 2, Errc::DimensionTooSmall, "equators need n >= 2");
    Mat<S> U = householder_to(sigma);
    Mat<S> M(nv_, nv_ - 1);
    for (int i = 0; i < nv_; ++i)
      for (int k = 0; k < nv_ - 1; ++k) M.at(i, k) = U.at(i, k + 1);
    return pullback_linear(M);
  }

  typename Ops::Real integrate_equator(const ProjPoint<S>& sigma) const {
    require(deg_ == 2 * (n() - 1), Errc::MalformedForm, "integrate_equator needs degree 2n-2");
    return equator_pullback(sigma).integrate_cpn();
  }

  PolyForm<CD> to_float() const {
    PolyForm<CD> r(nv_, deg_);
    for (const auto& [k, comp] : comps_) r.add_component(k, comp.num.to_float(), comp.den_pow);
    return r;
  }

 private:
  template <class T>
  friend class PolyForm;

  int nv_ = 0;
  int deg_ = 0;
  std::map<FormKey, Comp> comps_;
};

using QForm = PolyForm<GaussRat>;
using FForm = PolyForm<CD>;

// L^2(g) inner product of real (1,1) forms at a normalized Kaehler metric,
// via the Lefschetz split eta = f omega + gamma and the Riemann-Hodge
// relations:  <eta,xi> = n Int f_eta f_xi dVol - 1/(n-2)! Int gamma^gamma'^omega^{n-2}
// with all wedge integrals exact.
template <class S>
S l2_inner_11(const PolyForm<S>& eta, const PolyForm<S>& xi, const PolyForm<S>& omega) {
  using Ops = ScalarOps<S>;
  int n = omega.n();
  require(n >= 2, Errc::DimensionTooSmall, "l2_inner_11 needs n >= 2");
  require(omega.exterior_d().reduced().is_zero(), Errc::NotKahler, "l2_inner_11 needs a Kaehler form");
  S vol = omega.wedge_pow(n).integrate_cpn_c();
  require(Ops::is_zero(vol - Ops::one()), Errc::NotNormalized, "l2_inner_11 needs Int omega^n = 1");
  const PolyForm<S>& wn1 = omega.wedge_pow(n - 1);  // NB: recomputed; callers cache when hot
  auto f_eta = eta.wedge(wn1).top_ratio();
  auto f_xi = xi.wedge(wn1).top_ratio();
  S W = eta.wedge(xi).wedge(omega.wedge_pow(n - 2)).integrate_cpn_c();
  typename PolyForm<S>::Ratio ff{f_eta.num * f_xi.num, f_eta.den_pow + f_xi.den_pow};
  S Sm = omega.wedge_pow(n).scaled_by_function(ff).integrate_cpn_c();
  mpz_class nf = factorial_z(unsigned(n));
  mpz_class n2f = factorial_z(unsigned(n - 2));
  if constexpr (std::is_same_v<S, GaussRat>) {
    GaussRat a = GaussRat(mpq_class(n)) / GaussRat(mpq_class(nf));
    GaussRat b = GaussRat(1) / GaussRat(mpq_class(n2f));
    return a * Sm - b * (W - Sm);
  } else {
    double a = double(n) / nf.get_d();
    double b = 1.0 / n2f.get_d();
    return a * Sm - b * (W - Sm);
  }
}

template <class S>
typename ScalarOps<S>::Real l2_norm_sq_11(const PolyForm<S>& eta, const PolyForm<S>& omega) {
  S v = l2_inner_11(eta, eta, omega);
  if constexpr (std::is_same_v<S, GaussRat>) {
    require(v.is_real(), Errc::Internal, "l2 norm must be real");
    return v.re;
  } else {
    return v.real();
  }
}

}  // namespace cpsys
