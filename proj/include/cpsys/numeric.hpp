#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <string>

#include "cpsys/errors.hpp"

namespace cpsys {

using CD = std::complex<double>;

// Gaussian rational: re + im*i with exact rational parts. The coefficient
// field for the whole exact calculus.
struct GaussRat {
  mpq_class re, im;

  GaussRat() : re(0), im(0) {}
  GaussRat(long r) : re(r), im(0) {}
  GaussRat(const mpq_class& r) : re(r), im(0) {}
  GaussRat(mpq_class r, mpq_class i) : re(std::move(r)), im(std::move(i)) {}
  static GaussRat imag_unit() { return GaussRat(mpq_class(0), mpq_class(1)); }
  static GaussRat ratio(long num, long den) { return GaussRat(mpq_class(num, den)); }

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }

  GaussRat conj() const { return GaussRat(re, mpq_class(-im)); }
  mpq_class norm_sq() const { return re * re + im * im; }

  GaussRat operator-() const { return GaussRat(mpq_class(-re), mpq_class(-im)); }
  GaussRat& operator+=(const GaussRat& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  GaussRat& operator-=(const GaussRat& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  GaussRat& operator*=(const GaussRat& o) {
    mpq_class r = re * o.re - im * o.im;
    mpq_class i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    return *this;
  }
  GaussRat& operator/=(const GaussRat& o) {
    mpq_class d = o.norm_sq();
    require(d != 0, Errc::Internal, "division by zero GaussRat");
    mpq_class r = (re * o.re + im * o.im) / d;
    mpq_class i = (im * o.re - re * o.im) / d;
    re = std::move(r);
    im = std::move(i);
    return *this;
  }

  friend GaussRat operator+(GaussRat a, const GaussRat& b) { return a += b; }
  friend GaussRat operator-(GaussRat a, const GaussRat& b) { return a -= b; }
  friend GaussRat operator*(GaussRat a, const GaussRat& b) { return a *= b; }
  friend GaussRat operator/(GaussRat a, const GaussRat& b) { return a /= b; }
  friend bool operator==(const GaussRat& a, const GaussRat& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const GaussRat& a, const GaussRat& b) { return !(a == b); }

  CD to_cd() const { return CD(re.get_d(), im.get_d()); }
  std::string str() const { return re.get_str() + (im >= 0 ? "+" : "") + im.get_str() + "i"; }
};

// i^k for integer k (also handles negatives).
inline GaussRat ipow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return GaussRat(1);
    case 1: return GaussRat::imag_unit();
    case 2: return GaussRat(-1);
    default: return -GaussRat::imag_unit();
  }
}

inline CD ipow_cd(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return CD(1, 0);
    case 1: return CD(0, 1);
    case 2: return CD(-1, 0);
    default: return CD(0, -1);
  }
}

// Scalar traits: the polynomial/form templates are instantiated with
// S = GaussRat (exact mode) or S = std::complex<double> (float mode).
template <class S>
struct ScalarOps;

template <>
struct ScalarOps<GaussRat> {
  using Real = mpq_class;
  static GaussRat zero() { return GaussRat(); }
  static GaussRat one() { return GaussRat(1); }
  static GaussRat i_unit() { return GaussRat::imag_unit(); }
  static GaussRat i_pow(int k) { return ipow(k); }
  static bool is_zero(const GaussRat& x) { return x.is_zero(); }
  static GaussRat conj(const GaussRat& x) { return x.conj(); }
  static GaussRat from_long(long v) { return GaussRat(v); }
  static CD to_cd(const GaussRat& x) { return x.to_cd(); }
  static double real_to_double(const Real& r) { return r.get_d(); }
};

template <>
struct ScalarOps<CD> {
  using Real = double;
  static CD zero() { return CD(0, 0); }
  static CD one() { return CD(1, 0); }
  static CD i_unit() { return CD(0, 1); }
  static CD i_pow(int k) { return ipow_cd(k); }
  static bool is_zero(const CD& x) { return x.real() == 0.0 && x.imag() == 0.0; }
  static CD conj(const CD& x) { return std::conj(x); }
  static CD from_long(long v) { return CD(double(v), 0); }
  static CD to_cd(const CD& x) { return x; }
  static double real_to_double(double r) { return r; }
};

inline mpz_class factorial_z(unsigned k) {
  mpz_class f = 1;
  for (unsigned j = 2; j <= k; ++j) f *= j;
  return f;
}

}  // namespace cpsys
