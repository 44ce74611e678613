#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "resfree/operator.hpp"

namespace resfree {

/// LU factorization of a complex tridiagonal matrix with partial pivoting
/// (row interchanges add one extra superdiagonal to U).
struct TridiagLU {
  int n = 0;
  std::vector<Complex> dl, d, du, du2;
  std::vector<int> pivot_next;  // pivot_next[i] = 1 if rows i, i+1 swapped
  bool singular = false;

  explicit TridiagLU(const Tridiag& A)
      : n(A.n), dl(A.lower), d(A.main), du(A.upper),
        du2(std::max(0, A.n - 2)), pivot_next(std::max(0, A.n - 1), 0) {
    for (int i = 0; i < n - 1; ++i) {
      if (std::abs(d[i]) >= std::abs(dl[i])) {
        if (d[i] != Complex(0.0)) {
          const Complex fact = dl[i] / d[i];
          dl[i] = fact;
          d[i + 1] -= fact * du[i];
        } else {
          singular = true;
        }
        if (i < n - 2) du2[i] = 0.0;
      } else {
        const Complex fact = d[i] / dl[i];
        d[i] = dl[i];
        dl[i] = fact;
        const Complex tmp = du[i];
        du[i] = d[i + 1];
        d[i + 1] = tmp - fact * d[i + 1];
        if (i < n - 2) {
          du2[i] = du[i + 1];
          du[i + 1] = -fact * du[i + 1];
        }
        pivot_next[i] = 1;
      }
    }
    if (n > 0 && d[n - 1] == Complex(0.0)) singular = true;
  }

  /// Solves A x = b in place.
  void solve(std::vector<Complex>& b) const {
    if (singular) throw std::runtime_error("tridiagonal solve: singular pivot");
    for (int i = 0; i < n - 1; ++i) {
      if (pivot_next[i]) {
        const Complex tmp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = tmp - dl[i] * b[i];
      } else {
        b[i + 1] -= dl[i] * b[i];
      }
    }
    b[n - 1] /= d[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for (int i = n - 3; i >= 0; --i)
      b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
  }
};

inline Tridiag conjugate_transpose(const Tridiag& A) {
  Tridiag T(A.n);
  for (int i = 0; i < A.n; ++i) T.main[i] = std::conj(A.main[i]);
  for (int i = 0; i + 1 < A.n; ++i) {
    T.lower[i] = std::conj(A.upper[i]);
    T.upper[i] = std::conj(A.lower[i]);
  }
  return T;
}

inline double norm2(const std::vector<Complex>& v) {
  double acc = 0.0;
  for (const Complex& x : v) acc += std::norm(x);
  return std::sqrt(acc);
}

/// Smallest singular value of a tridiagonal matrix via power iteration on
/// (M M^H)^{-1} using the two banded LU factorizations; exact modulo the
/// iteration tolerance and O(n) per sweep.
inline double tridiag_sigma_min(const Tridiag& M, int max_iter = 500,
                                double tol = 1e-12) {
  const TridiagLU lu(M);
  const TridiagLU luH{conjugate_transpose(M)};
  if (lu.singular || luH.singular) return 0.0;

  const int n = M.n;
  std::vector<Complex> v(n, Complex(1.0 / std::sqrt(double(n))));
  double estimate = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    lu.solve(v);
    luH.solve(v);
    const double nrm = norm2(v);
    if (!(nrm > 0.0) || !std::isfinite(nrm)) return 0.0;
    const double next = 1.0 / std::sqrt(nrm);
    for (Complex& x : v) x /= nrm;
    if (it > 3 && std::abs(next - estimate) < tol * estimate) return next;
    estimate = next;
  }
  return estimate;
}

}  // namespace resfree
