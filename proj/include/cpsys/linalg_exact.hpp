#pragma once

#include <gmpxx.h>

#include <optional>
#include <vector>

#include "cpsys/errors.hpp"

namespace cpsys {

// Dense rational matrix (row-major) with exact Gaussian elimination.
// Pivoting is deterministic: columns in their given (label) order, first row
// with a nonzero entry. No magnitude pivoting is needed in exact arithmetic.
struct QMat {
  int rows = 0, cols = 0;
  std::vector<mpq_class> a;

  QMat() = default;
  QMat(int r, int c) : rows(r), cols(c), a(size_t(r) * size_t(c)) {}
  mpq_class& at(int i, int j) { return a[size_t(i) * size_t(cols) + size_t(j)]; }
  const mpq_class& at(int i, int j) const { return a[size_t(i) * size_t(cols) + size_t(j)]; }

  static QMat identity(int n) {
    QMat m(n, n);
    for (int j = 0; j < n; ++j) m.at(j, j) = 1;
    return m;
  }

  QMat transpose() const {
    QMat t(cols, rows);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) t.at(j, i) = at(i, j);
    return t;
  }

  QMat operator*(const QMat& o) const {
    require(cols == o.rows, Errc::Internal, "QMat dim mismatch");
    QMat r(rows, o.cols);
    for (int i = 0; i < rows; ++i)
      for (int k = 0; k < cols; ++k) {
        const mpq_class& v = at(i, k);
        if (v == 0) continue;
        for (int j = 0; j < o.cols; ++j) r.at(i, j) += v * o.at(k, j);
      }
    return r;
  }

  std::vector<mpq_class> apply(const std::vector<mpq_class>& x) const {
    require(int(x.size()) == cols, Errc::Internal, "QMat apply dim mismatch");
    auto y = std::vector<mpq_class>(size_t(rows));
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        if (at(i, j) != 0) y[size_t(i)] += at(i, j) * x[size_t(j)];
    return y;
  }
};

// Reduced row echelon form in place; returns pivot columns.
inline std::vector<int> rref_inplace(QMat& m) {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < m.cols && row < m.rows; ++col) {
    int p = -1;
    for (int i = row; i < m.rows; ++i)
      if (m.at(i, col) != 0) {
        p = i;
        break;
      }
    if (p < 0) continue;
    if (p != row)
      for (int j = 0; j < m.cols; ++j) std::swap(m.at(p, j), m.at(row, j));
    mpq_class inv = 1 / m.at(row, col);
    for (int j = col; j < m.cols; ++j) m.at(row, j) *= inv;
    for (int i = 0; i < m.rows; ++i) {
      if (i == row) continue;
      const mpq_class f = m.at(i, col);
      if (f == 0) continue;
      for (int j = col; j < m.cols; ++j) m.at(i, j) -= f * m.at(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

inline int rank(QMat m) { return int(rref_inplace(m).size()); }

// Columns form a deterministic basis of the nullspace (free variables in
// column-label order, each set to 1).
inline QMat nullspace(QMat m) {
  std::vector<int> pivots = rref_inplace(m);
  std::vector<bool> is_pivot(size_t(m.cols), false);
  for (int c : pivots) is_pivot[size_t(c)] = true;
  std::vector<int> free_cols;
  for (int c = 0; c < m.cols; ++c)
    if (!is_pivot[size_t(c)]) free_cols.push_back(c);
  QMat ns(m.cols, int(free_cols.size()));
  for (size_t f = 0; f < free_cols.size(); ++f) {
    int fc = free_cols[f];
    ns.at(fc, int(f)) = 1;
    for (size_t pi = 0; pi < pivots.size(); ++pi) ns.at(pivots[pi], int(f)) = -m.at(int(pi), fc);
  }
  return ns;
}

// Solve A x = b exactly; nullopt if inconsistent. When underdetermined,
// returns the deterministic particular solution with free variables 0.
inline std::optional<std::vector<mpq_class>> solve(const QMat& A, const std::vector<mpq_class>& b) {
  require(int(b.size()) == A.rows, Errc::Internal, "solve: rhs size mismatch");
  QMat aug(A.rows, A.cols + 1);
  for (int i = 0; i < A.rows; ++i) {
    for (int j = 0; j < A.cols; ++j) aug.at(i, j) = A.at(i, j);
    aug.at(i, A.cols) = b[size_t(i)];
  }
  std::vector<int> pivots = rref_inplace(aug);
  if (!pivots.empty() && pivots.back() == A.cols) return std::nullopt;  // inconsistent
  std::vector<mpq_class> x(size_t(A.cols));
  for (size_t pi = 0; pi < pivots.size(); ++pi) x[size_t(pivots[pi])] = aug.at(int(pi), A.cols);
  return x;
}

// Symmetric positive (semi)definite solve via plain elimination; the callers
// use it for Gram projections where exactness matters more than speed.
inline std::vector<mpq_class> solve_spd(const QMat& A, const std::vector<mpq_class>& b) {
  auto x = solve(A, b);
  require(x.has_value(), Errc::SingularGram, "gram system inconsistent");
  return *x;
}

}  // namespace cpsys
