#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "resfree/distortion.hpp"
#include "resfree/grid.hpp"
#include "resfree/potential.hpp"

namespace resfree {

/// Eigenvalue of -Delta on the (d-1)-sphere for angular momentum ell.
inline double angular_eigenvalue(int ell, int d) {
  if (ell < 0) throw std::invalid_argument("angular momentum must be >= 0");
  if (d < 2) throw std::invalid_argument("dimension must be >= 2");
  return double(ell) * (ell + d - 2);
}

/// Complex tridiagonal matrix (the only shape the discretization produces).
struct Tridiag {
  int n = 0;
  std::vector<Complex> lower;  // size n-1, entry (i+1, i)
  std::vector<Complex> main;   // size n
  std::vector<Complex> upper;  // size n-1, entry (i, i+1)

  explicit Tridiag(int n_) : n(n_), lower(n - 1), main(n), upper(n - 1) {}

  void apply(const std::vector<Complex>& x, std::vector<Complex>& y) const {
    for (int i = 0; i < n; ++i) {
      Complex acc = main[i] * x[i];
      if (i > 0) acc += lower[i - 1] * x[i - 1];
      if (i < n - 1) acc += upper[i] * x[i + 1];
      y[i] = acc;
    }
  }
};

/// Pointwise coefficients of the conjugated Laplacian written as
/// c2 d^2/dr^2 + c1 d/dr + c0 (so at theta = 0: c2 = -1, c1 = -(d-1)/r,
/// c0 = lambda_ell / r^2, i.e. minus the radial Laplacian).
struct LaplacianCoeffs {
  Complex c2, c1, c0;
};

enum class AssemblyMethod { raw, expanded };

/// Coefficients from the factored conjugation
///   -J^{1/2} b d_r b d_r J^{-1/2} - (d-1) J^{1/2} r_theta^{-1} b d_r J^{-1/2}
///   + r_theta^{-2} lambda_ell,          b = (dr_theta/dr)^{-1},
/// expanded with the exact product rule on jets of J^{+-1/2} and b.
inline LaplacianCoeffs raw_coeffs(const DistortionParams& p, double r,
                                  int ell) {
  const CJet rth = detail::r_theta_jet(p, r);
  const CJet rj = to_complex(RJet::variable(r));
  const CJet J = pow(rth / rj, double(p.d - 1)) * rth.derivative();
  const CJet g = pow(J, -0.5);           // g, g', g'' valid
  const CJet b = recip(rth.derivative());  // b, b', b'' valid
  const Complex a = 1.0 / g.value();       // J^{1/2}
  const Complex rth0 = rth.value();
  const double lam = angular_eigenvalue(ell, p.d);
  const double dm1 = p.d - 1;

  LaplacianCoeffs c;
  c.c2 = -a * b.value() * b.value() * g.value();
  c.c1 = -a * b.value() * (2.0 * b.value() * g.d1() + b.d1() * g.value()) -
         dm1 * a * b.value() * g.value() / rth0;
  c.c0 = -a * b.value() * (b.d1() * g.d1() + b.value() * g.d2()) -
         dm1 * a * b.value() * g.d1() / rth0 + lam / (rth0 * rth0);
  return c;
}

/// Coefficients from the expanded display: drift written through J'/J and
/// the curvature collected in phi(r).
inline LaplacianCoeffs expanded_coeffs(const DistortionParams& p, double r,
                                       int ell) {
  const RThetaDerivs rt = r_theta_eval(p, r);
  const JacobianDerivs J = jacobian_eval(p, r);
  const Complex bi2 = 1.0 / (rt.d1 * rt.d1);
  const double lam = angular_eigenvalue(ell, p.d);
  const double dm1 = p.d - 1;

  LaplacianCoeffs c;
  c.c2 = -bi2;
  c.c1 = bi2 * (-dm1 / r + J.d1 / J.value + rt.d2 / rt.d1 -
                dm1 * (rt.d1 * r / rt.value - 1.0) / r);
  c.c0 = bi2 * phi_coeff(p, r) + lam / (rt.value * rt.value);
  return c;
}

inline LaplacianCoeffs laplacian_coeffs(const DistortionParams& p, double r,
                                        int ell, AssemblyMethod method) {
  return method == AssemblyMethod::raw ? raw_coeffs(p, r, ell)
                                       : expanded_coeffs(p, r, ell);
}

/// Second-order stencil for c2 u'' + c1 u' + c0 u with unit Dirichlet rows
/// at both boundaries.
inline Tridiag assemble_conjugated_laplacian(const RadialGrid& grid, int ell,
                                             const DistortionParams& p,
                                             AssemblyMethod method) {
  if (grid.d != p.d)
    throw std::invalid_argument("assembly: grid and distortion dimensions differ");
  Tridiag A(grid.n);
  const double h = grid.h();
  for (int i = 0; i < grid.n; ++i) {
    const LaplacianCoeffs c = laplacian_coeffs(p, grid.r(i), ell, method);
    A.main[i] = -2.0 * c.c2 / (h * h) + c.c0;
    if (i > 0) A.lower[i - 1] = c.c2 / (h * h) - c.c1 / (2.0 * h);
    if (i < grid.n - 1) A.upper[i] = c.c2 / (h * h) + c.c1 / (2.0 * h);
  }
  // Dirichlet: unit rows; the two artificial eigenvalues at 1 are flagged by
  // boundary mass downstream.
  A.main[0] = 1.0;
  A.upper[0] = 0.0;
  A.main[grid.n - 1] = 1.0;
  A.lower[grid.n - 2] = 0.0;
  return A;
}

/// One angular-momentum block of H_theta on the grid.
struct SectorOperator {
  RadialGrid grid;
  int ell;
  double lambda_ell;
  double hbar;
  DistortionParams params;
  PotentialModel model;
  Tridiag matrix;
  std::vector<Complex> potential_diag;  // -1/2 r_theta^{2s} + q_theta per node
};

inline SectorOperator assemble_h_theta(const RadialGrid& grid, int ell,
                                       const DistortionParams& p,
                                       const PotentialModel& m, double hbar,
                                       AssemblyMethod method =
                                           AssemblyMethod::expanded) {
  if (!(hbar > 0.0)) throw std::invalid_argument("assembly: hbar must be > 0");
  Tridiag A = assemble_conjugated_laplacian(grid, ell, p, method);
  const double half_h2 = 0.5 * hbar * hbar;
  for (auto& v : A.lower) v *= half_h2;
  for (auto& v : A.upper) v *= half_h2;
  for (auto& v : A.main) v *= half_h2;

  std::vector<Complex> pot(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double r = grid.r(i);
    // The radicand is exactly r_theta^{2s} (s<1) resp. r_theta^2 (s=1).
    const Complex power = detail::radicand_jet(p, r).value();
    pot[i] = -0.5 * power + q_theta_eval(m, p, r);
    if (i > 0 && i < grid.n - 1) A.main[i] += pot[i];
  }
  // Restore the unit Dirichlet rows scaled away above.
  A.main[0] = 1.0;
  A.main[grid.n - 1] = 1.0;

  return SectorOperator{grid,  ell, angular_eigenvalue(ell, grid.d), hbar,
                        p,     m,   std::move(A),                    std::move(pot)};
}

/// Similarity W^{1/2} A W^{-1/2} with W the quadrature weights; symmetrizes
/// the theta = 0 operator and makes matrix norms agree with the weighted
/// L^2 norm.
inline Tridiag weighted_similarity(const SectorOperator& op) {
  Tridiag M = op.matrix;
  const std::vector<double> w = op.grid.weights();
  for (int i = 0; i + 1 < M.n; ++i) {
    const double ratio = std::sqrt(w[i] / w[i + 1]);
    M.upper[i] *= ratio;
    M.lower[i] /= ratio;
  }
  return M;
}

}  // namespace resfree
