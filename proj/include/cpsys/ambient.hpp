#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "cpsys/numeric.hpp"

namespace cpsys {

// Small dense matrix over the scalar S (row-major).
template <class S>
struct Mat {
  int rows = 0, cols = 0;
  std::vector<S> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(size_t(r) * size_t(c), ScalarOps<S>::zero()) {}
  static Mat identity(int n) {
    Mat m(n, n);
    for (int j = 0; j < n; ++j) m.at(j, j) = ScalarOps<S>::one();
    return m;
  }
  S& at(int i, int j) { return a[size_t(i) * size_t(cols) + size_t(j)]; }
  const S& at(int i, int j) const { return a[size_t(i) * size_t(cols) + size_t(j)]; }

  Mat operator*(const Mat& o) const {
    require(cols == o.rows, Errc::Internal, "matrix dim mismatch");
    Mat r(rows, o.cols);
    for (int i = 0; i < rows; ++i)
      for (int k = 0; k < cols; ++k) {
        if (ScalarOps<S>::is_zero(at(i, k))) continue;
        for (int j = 0; j < o.cols; ++j) r.at(i, j) += at(i, k) * o.at(k, j);
      }
    return r;
  }
  Mat adjoint() const {
    Mat r(cols, rows);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) r.at(j, i) = ScalarOps<S>::conj(at(i, j));
    return r;
  }
  std::vector<S> apply(const std::vector<S>& v) const {
    require(int(v.size()) == cols, Errc::Internal, "matrix apply dim mismatch");
    std::vector<S> r(size_t(rows), ScalarOps<S>::zero());
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) r[size_t(i)] += at(i, j) * v[size_t(j)];
    return r;
  }
  bool is_unitary_exact() const {
    if (rows != cols) return false;
    Mat p = *this * adjoint();
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) {
        S want = i == j ? ScalarOps<S>::one() : ScalarOps<S>::zero();
        if (!ScalarOps<S>::is_zero(p.at(i, j) - want)) return false;
      }
    return true;
  }
  double unitary_residual() const {
    Mat p = *this * adjoint();
    double worst = 0;
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) {
        CD v = ScalarOps<S>::to_cd(p.at(i, j)) - (i == j ? CD(1, 0) : CD(0, 0));
        worst = std::max(worst, std::abs(v));
      }
    return worst;
  }
};

// A point of CP^n held as an ambient representative. In float mode coords are
// normalized to unit length; in exact mode norm_sq carries the exact squared
// norm of the stored representative.
template <class S>
struct ProjPoint {
  std::vector<S> coords;
  typename ScalarOps<S>::Real norm_sq{};

  int nvars() const { return int(coords.size()); }
  std::vector<CD> to_cd() const {
    std::vector<CD> r(coords.size());
    for (size_t j = 0; j < coords.size(); ++j) r[j] = ScalarOps<S>::to_cd(coords[j]);
    return r;
  }
};

inline ProjPoint<CD> unit_point(std::vector<CD> coords) {
  double n2 = 0;
  for (const CD& c : coords) n2 += std::norm(c);
  require(n2 > 0, Errc::ZeroVector, "unit_point: zero vector");
  double inv = 1.0 / std::sqrt(n2);
  for (CD& c : coords) c *= inv;
  return ProjPoint<CD>{std::move(coords), 1.0};
}

inline ProjPoint<GaussRat> unit_point(std::vector<GaussRat> coords) {
  mpq_class n2 = 0;
  for (const GaussRat& c : coords) n2 += c.norm_sq();
  require(n2 != 0, Errc::ZeroVector, "unit_point: zero vector");
  return ProjPoint<GaussRat>{std::move(coords), n2};
}

inline ProjPoint<GaussRat> basis_point(int nvars, int j) {
  auto c = std::vector<GaussRat>(size_t(nvars));
  c[size_t(j)] = GaussRat(1);
  return unit_point(std::move(c));
}

// |<u,v>|^2 == |u|^2 |v|^2 up to phase-equality of projective points.
template <class S>
bool projectively_equal(const ProjPoint<S>& u, const ProjPoint<S>& v, double tol = 1e-12) {
  S inner = ScalarOps<S>::zero();
  for (size_t j = 0; j < u.coords.size(); ++j) inner += u.coords[j] * ScalarOps<S>::conj(v.coords[j]);
  if constexpr (std::is_same_v<S, GaussRat>) {
    (void)tol;
    return inner.norm_sq() == u.norm_sq * v.norm_sq;
  } else {
    return std::abs(std::norm(inner) - u.norm_sq * v.norm_sq) <= tol;
  }
}

inline std::optional<mpq_class> exact_sqrt(const mpq_class& q) {
  if (q < 0) return std::nullopt;
  mpz_class num = q.get_num(), den = q.get_den();
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
  if (rn * rn != num || rd * rd != den) return std::nullopt;
  return mpq_class(rn, rd);
}

// Exact canonical representative: unit norm with the first nonzero coordinate
// real and positive. Requires |sigma| and the phase of the leading coordinate
// to be rational; returns nullopt otherwise.
inline std::optional<ProjPoint<GaussRat>> canonicalize_exact(const ProjPoint<GaussRat>& p) {
  auto norm = exact_sqrt(p.norm_sq);
  if (!norm) return std::nullopt;
  int lead = -1;
  for (size_t j = 0; j < p.coords.size(); ++j)
    if (!p.coords[j].is_zero()) {
      lead = int(j);
      break;
    }
  if (lead < 0) return std::nullopt;
  auto lead_abs = exact_sqrt(p.coords[size_t(lead)].norm_sq());
  if (!lead_abs) return std::nullopt;
  // phase = conj(c)/|c|, then scale everything by phase/|sigma|.
  GaussRat scale = p.coords[size_t(lead)].conj() / GaussRat(*lead_abs * *norm);
  std::vector<GaussRat> out(p.coords.size());
  for (size_t j = 0; j < p.coords.size(); ++j) out[j] = p.coords[j] * scale;
  ProjPoint<GaussRat> r{std::move(out), mpq_class(1)};
  mpq_class check = 0;
  for (const auto& c : r.coords) check += c.norm_sq();
  if (check != 1) return std::nullopt;
  return r;
}

// Unitary U with U e_0 = sigma-hat (projectively). Deterministic: identity at
// e_0; otherwise a Householder reflection through v = sigma-hat - e_j (with the
// phase fixed at the first coordinate whose modulus is rational, exact mode)
// composed with the 0<->j transposition. Exact inputs give exact
// Gaussian-rational unitaries.
template <class S>
Mat<S> householder_to(const ProjPoint<S>& sigma) {
  using Ops = ScalarOps<S>;
  int nv = sigma.nvars();
  require(nv >= 1, Errc::InvalidPoint, "empty point");
  std::vector<S> s;
  int pivot = -1;
  if constexpr (std::is_same_v<S, GaussRat>) {
    auto norm = exact_sqrt(sigma.norm_sq);
    require(norm.has_value(), Errc::NonRationalNorm,
            "exact householder_to needs |sigma| rational; use float mode otherwise");
    for (int j = 0; j < nv && pivot < 0; ++j) {
      if (sigma.coords[size_t(j)].is_zero()) continue;
      if (exact_sqrt(sigma.coords[size_t(j)].norm_sq()).has_value()) pivot = j;
    }
    require(pivot >= 0, Errc::NonRationalNorm,
            "exact householder_to needs a coordinate of rational modulus; use float mode");
    auto pabs = exact_sqrt(sigma.coords[size_t(pivot)].norm_sq());
    GaussRat scale = sigma.coords[size_t(pivot)].conj() / GaussRat(*pabs * *norm);
    s.resize(size_t(nv));
    for (int j = 0; j < nv; ++j) s[size_t(j)] = sigma.coords[size_t(j)] * scale;
  } else {
    double n2 = sigma.norm_sq;
    require(n2 > 0, Errc::ZeroVector, "householder_to: zero point");
    s = sigma.coords;
    double inv = 1.0 / std::sqrt(n2);
    for (auto& c : s) c *= inv;
    // Phase-fix at the coordinate of largest modulus for conditioning.
    double best = 0;
    for (int j = 0; j < nv; ++j)
      if (std::abs(s[size_t(j)]) > best) {
        best = std::abs(s[size_t(j)]);
        pivot = j;
      }
    require(pivot >= 0 && best > 0, Errc::ZeroVector, "householder_to: zero point");
    CD ph = std::conj(s[size_t(pivot)]) / std::abs(s[size_t(pivot)]);
    for (auto& c : s) c *= ph;
  }
  // v = s - e_pivot; if s == e_pivot the reflection degenerates to identity.
  std::vector<S> v = s;
  v[size_t(pivot)] -= Ops::one();
  bool zero = true;
  for (const auto& c : v)
    if (!Ops::is_zero(c)) zero = false;
  Mat<S> H = Mat<S>::identity(nv);
  if (!zero) {
    S vn = Ops::zero();
    for (const auto& c : v) vn += c * Ops::conj(c);
    S two = Ops::from_long(2);
    for (int i = 0; i < nv; ++i)
      for (int j = 0; j < nv; ++j) H.at(i, j) -= two * v[size_t(i)] * Ops::conj(v[size_t(j)]) / vn;
  }
  if (pivot == 0) return H;
  // Compose with the 0<->pivot transposition so that e_0 lands on sigma-hat.
  Mat<S> U(nv, nv);
  for (int i = 0; i < nv; ++i) {
    int src0 = pivot, srcp = 0;
    U.at(i, 0) = H.at(i, src0);
    U.at(i, pivot) = H.at(i, srcp);
    for (int j = 0; j < nv; ++j)
      if (j != 0 && j != pivot) U.at(i, j) = H.at(i, j);
  }
  return U;
}

namespace detail {
// Platform-stable uniform doubles and normals from mt19937_64.
inline double next_unit(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }
inline double next_normal(std::mt19937_64& rng, bool& have_spare, double& spare) {
  if (have_spare) {
    have_spare = false;
    return spare;
  }
  double u = next_unit(rng);
  double v = next_unit(rng);
  if (u < 1e-300) u = 1e-300;
  double r = std::sqrt(-2.0 * std::log(u));
  double a = 6.283185307179586476925286766559 * v;
  spare = r * std::sin(a);
  have_spare = true;
  return r * std::cos(a);
}
}  // namespace detail

// Reproducible uniform sample on CP^n via normalized complex Gaussians.
inline std::vector<ProjPoint<CD>> sample_sigma(int n, int count, uint64_t seed) {
  require(count >= 1, Errc::ConfigInvalid, "sample_sigma: count must be >= 1");
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  bool have_spare = false;
  double spare = 0;
  std::vector<ProjPoint<CD>> out;
  out.reserve(size_t(count));
  for (int s = 0; s < count; ++s) {
    std::vector<CD> z(size_t(n + 1));
    for (auto& c : z)
      c = CD(detail::next_normal(rng, have_spare, spare), detail::next_normal(rng, have_spare, spare));
    out.push_back(unit_point(std::move(z)));
  }
  return out;
}

// The finite symmetry group used for exact symmetrization: all coordinate
// permutations composed with per-coordinate powers of i. Returned as
// substitution matrices (each row has a single unit entry).
inline std::vector<Mat<GaussRat>> signed_permutation_group(int nvars) {
  auto perm = std::vector<int>(size_t(nvars));
  for (int j = 0; j < nvars; ++j) perm[size_t(j)] = j;
  std::vector<Mat<GaussRat>> out;
  do {
    int phases = 1;
    for (int j = 0; j < nvars; ++j) phases *= 4;
    for (int code = 0; code < phases; ++code) {
      Mat<GaussRat> m(nvars, nvars);
      int c = code;
      for (int i = 0; i < nvars; ++i) {
        m.at(i, perm[size_t(i)]) = ipow(c & 3);
        c >>= 2;
      }
      out.push_back(std::move(m));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

// Deterministic pseudo-random exact unitaries: products of exact Householder
// reflections through small Gaussian-integer vectors and group elements.
inline std::vector<Mat<GaussRat>> random_exact_unitaries(int nvars, int count, uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0xd1b54a32d192ed03ull);
  std::vector<Mat<GaussRat>> out;
  auto reflect = [&](const std::vector<GaussRat>& v) {
    GaussRat vn;
    for (const auto& c : v) vn += c * c.conj();
    Mat<GaussRat> H = Mat<GaussRat>::identity(nvars);
    GaussRat two = GaussRat(2);
    for (int i = 0; i < nvars; ++i)
      for (int j = 0; j < nvars; ++j) H.at(i, j) -= two * v[size_t(i)] * v[size_t(j)].conj() / vn;
    return H;
  };
  while (int(out.size()) < count) {
    auto v = std::vector<GaussRat>(size_t(nvars));
    bool nonzero = false;
    for (auto& c : v) {
      long re = long(rng() % 5) - 2;
      long im = long(rng() % 5) - 2;
      c = GaussRat(mpq_class(re), mpq_class(im));
      if (!c.is_zero()) nonzero = true;
    }
    if (!nonzero) continue;
    auto w = std::vector<GaussRat>(size_t(nvars));
    nonzero = false;
    for (auto& c : w) {
      long re = long(rng() % 3) - 1;
      long im = long(rng() % 3) - 1;
      c = GaussRat(mpq_class(re), mpq_class(im));
      if (!c.is_zero()) nonzero = true;
    }
    Mat<GaussRat> U = reflect(v);
    if (nonzero) U = U * reflect(w);
    // Mix in a diagonal phase for variety.
    Mat<GaussRat> D(nvars, nvars);
    for (int j = 0; j < nvars; ++j) D.at(j, j) = ipow(int(rng() & 3));
    out.push_back(U * D);
  }
  return out;
}

template <class S>
Mat<CD> to_float(const Mat<S>& m) {
  Mat<CD> r(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) r.at(i, j) = ScalarOps<S>::to_cd(m.at(i, j));
  return r;
}

}  // namespace cpsys
