// SPDX-License-Identifier: Apache-2.0
//
// Dense square matrices over double or Jet, and the SPD solves the spray
// formulas need.  Cholesky runs without pivoting: a nonpositive pivot is
// the signal that a metric tensor degenerated at the query point.

#ifndef FINSLER_LINALG_HPP
#define FINSLER_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/jet.hpp"

namespace finsler {

template <typename T>
class Matrix {
 public:
  Matrix() : n_(0) {}
  explicit Matrix(int n) : n_(n), d_(static_cast<std::size_t>(n) * n) {}
  Matrix(int n, const T& init)
      : n_(n), d_(static_cast<std::size_t>(n) * n, init) {}

  int dim() const { return n_; }
  T& operator()(int i, int j) { return d_[static_cast<std::size_t>(i) * n_ + j]; }
  const T& operator()(int i, int j) const {
    return d_[static_cast<std::size_t>(i) * n_ + j];
  }
  std::span<const T> data() const { return d_; }

 private:
  int n_;
  std::vector<T> d_;
};

inline double scalar_value(double v) { return v; }
inline double scalar_value(const Jet& v) { return v.value(); }

/// Lower Cholesky factor; throws NumericError on a nonpositive pivot.
template <typename T>
Matrix<T> cholesky(const Matrix<T>& m) {
  using std::sqrt;
  const int n = m.dim();
  Matrix<T> L = m;
  for (int j = 0; j < n; ++j) {
    T piv = m(j, j);
    for (int k = 0; k < j; ++k) piv -= L(j, k) * L(j, k);
    if (!(scalar_value(piv) > 0.0))
      throw NumericError(
          "matrix is not positive definite (pivot " +
          std::to_string(scalar_value(piv)) + " at row " + std::to_string(j) +
          ")");
    L(j, j) = sqrt(piv);
    for (int i = j + 1; i < n; ++i) {
      T acc = m(i, j);
      for (int k = 0; k < j; ++k) acc -= L(i, k) * L(j, k);
      L(i, j) = acc / L(j, j);
    }
    for (int k = j + 1; k < n; ++k) L(j, k) *= 0.0;  // zero the upper triangle
  }
  return L;
}

template <typename T>
std::vector<T> cholesky_solve(const Matrix<T>& L, std::span<const T> rhs) {
  const int n = L.dim();
  std::vector<T> y(rhs.begin(), rhs.end());
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < i; ++k) y[i] -= L(i, k) * y[k];
    y[i] = y[i] / L(i, i);
  }
  for (int i = n - 1; i >= 0; --i) {
    for (int k = i + 1; k < n; ++k) y[i] -= L(k, i) * y[k];
    y[i] = y[i] / L(i, i);
  }
  return y;
}

/// Solve m x = rhs for symmetric positive definite m.
template <typename T>
std::vector<T> solve_spd(const Matrix<T>& m, std::span<const T> rhs) {
  return cholesky_solve(cholesky(m), rhs);
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations,
/// ascending.  Used for diagnostics (positive-definiteness margins).
inline std::vector<double> sym_eigenvalues(Matrix<double> m) {
  const int n = m.dim();
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += m(p, q) * m(p, q);
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(m(p, q)) < 1e-300) continue;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double mkp = m(k, p), mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (int k = 0; k < n; ++k) {
          const double mpk = m(p, k), mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = m(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

}  // namespace finsler

#endif
