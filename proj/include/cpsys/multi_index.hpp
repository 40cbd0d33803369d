#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>

#include "cpsys/errors.hpp"

namespace cpsys {

// Hard cap on ambient variables (n+1). The library targets CP^2 and CP^3,
// plus their equators down to CP^1, so 6 leaves headroom.
inline constexpr int kMaxVars = 6;

// Exponent vector of a monomial in z_0..z_nv-1 (or conjugates).
struct MultiIndex {
  std::array<uint8_t, kMaxVars> e{};
  uint8_t nv = 0;

  MultiIndex() = default;
  explicit MultiIndex(int nvars) : nv(uint8_t(nvars)) {
    require(nvars >= 0 && nvars <= kMaxVars, Errc::Internal, "MultiIndex nvars out of range");
  }
  static MultiIndex unit(int nvars, int j) {
    MultiIndex m(nvars);
    m.e[size_t(j)] = 1;
    return m;
  }

  int degree() const {
    int d = 0;
    for (int j = 0; j < nv; ++j) d += e[size_t(j)];
    return d;
  }
  uint8_t operator[](int j) const { return e[size_t(j)]; }
  uint8_t& operator[](int j) { return e[size_t(j)]; }

  MultiIndex plus(const MultiIndex& o) const {
    MultiIndex r(nv);
    for (int j = 0; j < nv; ++j) r.e[size_t(j)] = uint8_t(e[size_t(j)] + o.e[size_t(j)]);
    return r;
  }
  // Decrement slot j; caller must know e[j] > 0.
  MultiIndex minus_unit(int j) const {
    MultiIndex r = *this;
    r.e[size_t(j)] -= 1;
    return r;
  }
  MultiIndex plus_unit(int j) const {
    MultiIndex r = *this;
    r.e[size_t(j)] += 1;
    return r;
  }

  auto operator<=>(const MultiIndex&) const = default;

  std::string str() const {
    std::string s = "(";
    for (int j = 0; j < nv; ++j) s += std::to_string(int(e[size_t(j)])) + (j + 1 < nv ? "," : "");
    return s + ")";
  }
};

// Key of one bihomogeneous term z^alpha zbar^beta.
struct TermKey {
  MultiIndex alpha, beta;
  auto operator<=>(const TermKey&) const = default;
};

}  // namespace cpsys
