#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace resfree {

/// Uniform radial grid including both endpoints, carrying the trapezoid
/// quadrature weights of L^2(r^{d-1} dr).
struct RadialGrid {
  double r_min;
  double r_max;
  int n;
  int d;

  RadialGrid(double r_min_, double r_max_, int n_, int d_)
      : r_min(r_min_), r_max(r_max_), n(n_), d(d_) {
    if (!(r_min > 0.0)) throw std::invalid_argument("grid: r_min must be > 0");
    if (!(r_max > r_min))
      throw std::invalid_argument("grid: r_max must exceed r_min");
    if (n < 16) throw std::invalid_argument("grid: need at least 16 points");
    if (d < 2) throw std::invalid_argument("grid: dimension must be >= 2");
  }

  double h() const { return (r_max - r_min) / (n - 1); }
  double r(int i) const { return r_min + i * h(); }

  std::vector<double> points() const {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = r(i);
    return out;
  }

  /// w_i = r_i^{d-1} h, halved at both ends.
  std::vector<double> weights() const {
    std::vector<double> w(n);
    const double step = h();
    for (int i = 0; i < n; ++i) w[i] = std::pow(r(i), d - 1) * step;
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
  }
};

}  // namespace resfree
