#pragma once

#include <map>
#include <optional>
#include <vector>

#include "cpsys/multi_index.hpp"
#include "cpsys/numeric.hpp"

namespace cpsys {

// Exact moment of a monomial over the unit sphere S^{2n+1} with the uniform
// probability measure: E[z^a zbar^b] = delta_{ab} * n! a! / (n+|a|)!.
inline mpq_class sphere_moment(int nvars, const MultiIndex& alpha) {
  int n = nvars - 1;
  mpz_class num = factorial_z(unsigned(n));
  for (int j = 0; j < nvars; ++j) num *= factorial_z(alpha[j]);
  mpz_class den = factorial_z(unsigned(n + alpha.degree()));
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

// Bihomogeneous polynomial in (z, zbar): finite sum of c * z^alpha zbar^beta
// where every stored term shares the bidegree (adeg, bdeg). Zero coefficients
// are never stored.
template <class S>
class BihomPoly {
 public:
  using Ops = ScalarOps<S>;
  using TermMap = std::map<TermKey, S>;

  BihomPoly() = default;
  BihomPoly(int nvars, int adeg, int bdeg) : nv_(nvars), adeg_(adeg), bdeg_(bdeg) {}

  static BihomPoly zero(int nvars, int adeg, int bdeg) { return BihomPoly(nvars, adeg, bdeg); }
  static BihomPoly constant(int nvars, S c) {
    BihomPoly p(nvars, 0, 0);
    if (!Ops::is_zero(c)) p.terms_.emplace(TermKey{MultiIndex(nvars), MultiIndex(nvars)}, std::move(c));
    return p;
  }
  static BihomPoly monomial(int nvars, const MultiIndex& a, const MultiIndex& b, S c) {
    BihomPoly p(nvars, a.degree(), b.degree());
    if (!Ops::is_zero(c)) p.terms_.emplace(TermKey{a, b}, std::move(c));
    return p;
  }
  // |z|^2 = sum_j z_j zbar_j
  static BihomPoly norm_sq(int nvars) {
    BihomPoly p(nvars, 1, 1);
    for (int j = 0; j < nvars; ++j)
      p.terms_.emplace(TermKey{MultiIndex::unit(nvars, j), MultiIndex::unit(nvars, j)}, Ops::one());
    return p;
  }

  int nvars() const { return nv_; }
  int adeg() const { return adeg_; }
  int bdeg() const { return bdeg_; }
  bool is_zero() const { return terms_.empty(); }
  const TermMap& terms() const { return terms_; }
  size_t term_count() const { return terms_.size(); }

  void add_term(const TermKey& k, const S& c) {
    if (Ops::is_zero(c)) return;
    auto [it, inserted] = terms_.emplace(k, c);
    if (!inserted) {
      it->second += c;
      if (Ops::is_zero(it->second)) terms_.erase(it);
    }
  }

  BihomPoly& operator+=(const BihomPoly& o) {
    if (o.is_zero()) return *this;
    if (is_zero()) {
      *this = o;
      return *this;
    }
    require(nv_ == o.nv_, Errc::BidegreeMismatch, "variable count mismatch in add");
    require(adeg_ == o.adeg_ && bdeg_ == o.bdeg_, Errc::BidegreeMismatch,
            "bidegree mismatch in add: (" + std::to_string(adeg_) + "," + std::to_string(bdeg_) +
                ") vs (" + std::to_string(o.adeg_) + "," + std::to_string(o.bdeg_) + ")");
    for (const auto& [k, c] : o.terms_) add_term(k, c);
    return *this;
  }
  BihomPoly& operator-=(const BihomPoly& o) { return *this += -o; }
  BihomPoly operator-() const {
    BihomPoly r(nv_, adeg_, bdeg_);
    for (const auto& [k, c] : terms_) r.terms_.emplace(k, -c);
    return r;
  }
  friend BihomPoly operator+(BihomPoly a, const BihomPoly& b) { return a += b; }
  friend BihomPoly operator-(BihomPoly a, const BihomPoly& b) { return a -= b; }

  BihomPoly operator*(const BihomPoly& o) const {
    require(nv_ == o.nv_, Errc::BidegreeMismatch, "variable count mismatch in mul");
    BihomPoly r(nv_, adeg_ + o.adeg_, bdeg_ + o.bdeg_);
    if (is_zero() || o.is_zero()) return r;
    for (const auto& [k1, c1] : terms_)
      for (const auto& [k2, c2] : o.terms_)
        r.add_term(TermKey{k1.alpha.plus(k2.alpha), k1.beta.plus(k2.beta)}, c1 * c2);
    return r;
  }

  BihomPoly scaled(const S& c) const {
    BihomPoly r(nv_, adeg_, bdeg_);
    if (Ops::is_zero(c)) return r;
    for (const auto& [k, v] : terms_) r.terms_.emplace(k, v * c);
    return r;
  }

  // Complex conjugate: swaps alpha <-> beta and conjugates coefficients.
  BihomPoly conjugate() const {
    BihomPoly r(nv_, bdeg_, adeg_);
    for (const auto& [k, v] : terms_) r.terms_.emplace(TermKey{k.beta, k.alpha}, Ops::conj(v));
    return r;
  }
  bool is_real() const { return *this == conjugate(); }

  friend bool operator==(const BihomPoly& a, const BihomPoly& b) {
    if (a.is_zero() && b.is_zero()) return a.nv_ == b.nv_;
    return a.nv_ == b.nv_ && a.adeg_ == b.adeg_ && a.bdeg_ == b.bdeg_ && a.terms_ == b.terms_;
  }

  enum class WirtKind { Holomorphic, Antiholomorphic };

  // Formal d/dz_j (Holomorphic) or d/dzbar_j (Antiholomorphic).
  BihomPoly wirtinger(int j, WirtKind kind) const {
    bool hol = kind == WirtKind::Holomorphic;
    BihomPoly r(nv_, adeg_ - (hol ? 1 : 0), bdeg_ - (hol ? 0 : 1));
    if (hol && adeg_ == 0) return BihomPoly(nv_, 0, bdeg_);
    if (!hol && bdeg_ == 0) return BihomPoly(nv_, adeg_, 0);
    for (const auto& [k, c] : terms_) {
      const MultiIndex& m = hol ? k.alpha : k.beta;
      if (m[j] == 0) continue;
      TermKey nk = hol ? TermKey{k.alpha.minus_unit(j), k.beta} : TermKey{k.alpha, k.beta.minus_unit(j)};
      r.add_term(nk, c * Ops::from_long(m[j]));
    }
    return r;
  }

  // Multiply by |z|^{2k}.
  BihomPoly mul_norm_pow(int k) const {
    if (k == 0 || is_zero()) {
      BihomPoly r = *this;
      r.adeg_ += k;
      r.bdeg_ += k;
      return r;
    }
    BihomPoly r = *this;
    BihomPoly ns = norm_sq(nv_);
    for (int t = 0; t < k; ++t) r = r * ns;
    return r;
  }

  // Exact division by |z|^{2k} if possible. Monomial-ordered division by
  // the single divisor |z|^2, whose lex-leading term is z_0 zbar_0.
  std::optional<BihomPoly> div_norm_pow(int k) const {
    if (k == 0) return *this;
    if (is_zero()) return BihomPoly(nv_, adeg_ - k, bdeg_ - k);
    if (adeg_ < k || bdeg_ < k) return std::nullopt;
    BihomPoly rem = *this;
    BihomPoly quot(nv_, adeg_ - 1, bdeg_ - 1);
    BihomPoly ns = norm_sq(nv_);
    while (!rem.is_zero()) {
      const auto& [key, c] = *rem.terms_.rbegin();
      if (key.alpha[0] == 0 || key.beta[0] == 0) return std::nullopt;
      TermKey qk{key.alpha.minus_unit(0), key.beta.minus_unit(0)};
      quot.add_term(qk, c);
      rem -= monomial(nv_, qk.alpha, qk.beta, c) * ns;
    }
    if (k == 1) return quot;
    return quot.div_norm_pow(k - 1);
  }

  // Exact uniform-measure integral over the unit sphere; only diagonal
  // (alpha == beta) terms contribute.
  typename Ops::Real sphere_integral() const {
    typename Ops::Real acc{};
    for (const auto& [k, c] : terms_) {
      if (k.alpha != k.beta) continue;
      if constexpr (std::is_same_v<S, GaussRat>) {
        require(c.is_real(), Errc::Internal, "diagonal coefficient of a sphere integrand must be real");
        acc += c.re * sphere_moment(nv_, k.alpha);
      } else {
        acc += c.real() * sphere_moment(nv_, k.alpha).get_d();
      }
    }
    return acc;
  }

  // As above but keeps the full (possibly non-real) value.
  S sphere_integral_c() const {
    S acc = Ops::zero();
    for (const auto& [k, c] : terms_) {
      if (k.alpha != k.beta) continue;
      mpq_class m = sphere_moment(nv_, k.alpha);
      if constexpr (std::is_same_v<S, GaussRat>) {
        acc += c * GaussRat(m);
      } else {
        acc += c * m.get_d();
      }
    }
    return acc;
  }

  template <class P>
  auto evaluate(const std::vector<P>& z) const {
    require(int(z.size()) == nv_, Errc::Internal, "evaluate: wrong point dimension");
    P acc{};
    for (const auto& [k, c] : terms_) {
      P t;
      if constexpr (std::is_same_v<P, CD>) {
        t = Ops::to_cd(c);
      } else {
        t = c;
      }
      for (int j = 0; j < nv_; ++j) {
        for (int e = 0; e < k.alpha[j]; ++e) t *= z[size_t(j)];
        P zc = [&] {
          if constexpr (std::is_same_v<P, CD>) return std::conj(z[size_t(j)]);
          else return z[size_t(j)].conj();
        }();
        for (int e = 0; e < k.beta[j]; ++e) t *= zc;
      }
      acc += t;
    }
    return acc;
  }

  // Substitute z_i = sum_k M[i][k] w_k (and conjugates accordingly).
  // M has nv_ rows; the result lives in M[0].size() variables.
  BihomPoly substitute_linear(const std::vector<std::vector<S>>& M) const {
    require(int(M.size()) == nv_, Errc::Internal, "substitute_linear: row count mismatch");
    int nw = int(M[0].size());
    BihomPoly r(nw, adeg_, bdeg_);
    if (is_zero()) return r;
    // Cache powers of each substituted linear form.
    auto hol = std::vector<std::vector<BihomPoly>>(size_t(nv_));
    auto anti = std::vector<std::vector<BihomPoly>>(size_t(nv_));
    auto lin_form = [&](int i, bool conj_row) {
      BihomPoly f(nw, conj_row ? 0 : 1, conj_row ? 1 : 0);
      for (int k = 0; k < nw; ++k) {
        const S& c = M[size_t(i)][size_t(k)];
        if (Ops::is_zero(c)) continue;
        MultiIndex u = MultiIndex::unit(nw, k);
        if (conj_row)
          f.add_term(TermKey{MultiIndex(nw), u}, Ops::conj(c));
        else
          f.add_term(TermKey{u, MultiIndex(nw)}, c);
      }
      return f;
    };
    auto power = [&](std::vector<BihomPoly>& cache, int i, int p, bool conj_row) -> const BihomPoly& {
      if (cache.empty()) cache.push_back(constant(nw, Ops::one()));
      while (int(cache.size()) <= p) cache.push_back(cache.back() * lin_form(i, conj_row));
      return cache[size_t(p)];
    };
    for (const auto& [k, c] : terms_) {
      BihomPoly t = constant(nw, c);
      for (int j = 0; j < nv_; ++j) {
        if (k.alpha[j] > 0) t = t * power(hol[size_t(j)], j, k.alpha[j], false);
        if (k.beta[j] > 0) t = t * power(anti[size_t(j)], j, k.beta[j], true);
      }
      if (!t.is_zero()) {
        BihomPoly shaped(nw, adeg_, bdeg_);
        shaped.terms_ = std::move(t.terms_);
        r += shaped;
      }
    }
    return r;
  }

  BihomPoly<CD> to_float() const {
    BihomPoly<CD> r(nv_, adeg_, bdeg_);
    for (const auto& [k, c] : terms_) r.add_term(k, Ops::to_cd(c));
    return r;
  }

 private:
  template <class T>
  friend class BihomPoly;

  int nv_ = 0;
  int adeg_ = 0;
  int bdeg_ = 0;
  TermMap terms_;
};

// Bilinear sphere pairing: integral over the sphere of
// p * q * z^extra_a zbar^extra_b, grouping q's terms by exponent offset so
// only diagonal products are touched.
template <class S>
S sphere_bilinear(const BihomPoly<S>& p, const BihomPoly<S>& q, const MultiIndex& extra_a,
                  const MultiIndex& extra_b) {
  using Ops = ScalarOps<S>;
  S acc = Ops::zero();
  if (p.is_zero() || q.is_zero()) return acc;
  // Group q terms by (alpha - beta) signature for quick matching.
  std::map<std::array<int8_t, kMaxVars>, std::vector<const std::pair<const TermKey, S>*>> buckets;
  for (const auto& kv : q.terms()) {
    std::array<int8_t, kMaxVars> sig{};
    for (int j = 0; j < q.nvars(); ++j) sig[size_t(j)] = int8_t(kv.first.alpha[j] - kv.first.beta[j]);
    buckets[sig].push_back(&kv);
  }
  for (const auto& [k1, c1] : p.terms()) {
    // Need alpha1+alpha2+ea == beta1+beta2+eb.
    std::array<int8_t, kMaxVars> want{};
    for (int j = 0; j < p.nvars(); ++j)
      want[size_t(j)] = int8_t((k1.beta[j] + extra_b[j]) - (k1.alpha[j] + extra_a[j]));
    auto it = buckets.find(want);
    if (it == buckets.end()) continue;
    for (const auto* kv : it->second) {
      MultiIndex total = k1.alpha.plus(kv->first.alpha).plus(extra_a);
      mpq_class m = sphere_moment(p.nvars(), total);
      if constexpr (std::is_same_v<S, GaussRat>) {
        acc += c1 * kv->second * GaussRat(m);
      } else {
        acc += c1 * kv->second * m.get_d();
      }
    }
  }
  return acc;
}

using QPoly = BihomPoly<GaussRat>;
using FPoly = BihomPoly<CD>;

}  // namespace cpsys
