#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "resfree/potential.hpp"

namespace resfree {

/// Escape function g: r^{2-2s}/(2(1-s)) for s < 1, (log r)^2/2 for s = 1.
inline double escape_g(double s, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("escape_g: r must be > 0");
  if (s < 1.0) return std::pow(r, 2.0 - 2.0 * s) / (2.0 * (1.0 - s));
  const double lg = std::log(r);
  return 0.5 * lg * lg;
}

inline double escape_g_d1(double s, double r) {
  return s < 1.0 ? std::pow(r, 1.0 - 2.0 * s) : std::log(r) / r;
}

inline double escape_g_d2(double s, double r) {
  return s < 1.0 ? (1.0 - 2.0 * s) * std::pow(r, -2.0 * s)
                 : (1.0 - std::log(r)) / (r * r);
}

struct PhasePoint {
  std::vector<double> x;
  std::vector<double> xi;
};

inline double radius(const PhasePoint& pt) {
  double acc = 0.0;
  for (double v : pt.x) acc += v * v;
  return std::sqrt(acc);
}

/// Classical Hamiltonian h = 1/2 xi^2 - 1/2 r^{2s} + q(r).
inline double h_value(const PotentialModel& m, double s,
                      const PhasePoint& pt) {
  double kin = 0.0;
  for (double v : pt.xi) kin += v * v;
  const double r = radius(pt);
  return 0.5 * kin - 0.5 * std::pow(r, 2.0 * s) + q_eval(m, r, 0);
}

/// Poisson bracket {h, a} with a = g'(r) (x/r) . xi. Splitting xi into the
/// radial part xi_r = (x/r) . xi and the tangential remainder gives
///   {h, a} = g'' xi_r^2 + g' |xi_t|^2 / r + s g' r^{2s-1} - g' q'(r),
/// independent of the shell. At purely radial on-shell points this equals
/// the condition (iii) expression before subtracting mu.
inline double poisson_bracket(const PotentialModel& m, double s,
                              const PhasePoint& pt) {
  const double r = radius(pt);
  if (!(r > 0.0))
    throw std::invalid_argument("poisson_bracket: |x| must be > 0");
  double xi2 = 0.0, xr = 0.0;
  for (size_t i = 0; i < pt.x.size(); ++i) {
    xi2 += pt.xi[i] * pt.xi[i];
    xr += pt.x[i] * pt.xi[i];
  }
  const double xi_r = xr / r;
  const double xi_t2 = std::max(0.0, xi2 - xi_r * xi_r);
  return escape_g_d2(s, r) * xi_r * xi_r +
         escape_g_d1(s, r) * xi_t2 / r +
         s * escape_g_d1(s, r) * std::pow(r, 2.0 * s - 1.0) -
         escape_g_d1(s, r) * q_eval(m, r, 1);
}

/// Shell-restricted variant: rejects points whose energy misses E.
inline double poisson_bracket_on_shell(const PotentialModel& m, double s,
                                       double E, const PhasePoint& pt) {
  if (std::abs(h_value(m, s, pt) - E) >= 1e-9)
    throw std::invalid_argument(
        "poisson_bracket_on_shell: point is off the energy shell");
  return poisson_bracket(m, s, pt);
}

struct TrajectorySample {
  double t, r, g, h;
  PhasePoint state;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  bool complete = true;  // false if the integration hit the overflow guard
};

/// Classical flow of h by the standard 4th-order Runge-Kutta step.
/// Hamilton's equations: dx/dt = xi, dxi/dt = s r^{2s-2} x - q'(r) x / r.
inline Trajectory integrate_trajectory(const PotentialModel& m, double s,
                                       const PhasePoint& start, double t_max,
                                       double dt) {
  if (!(dt > 0.0))
    throw std::invalid_argument("integrate_trajectory: dt must be > 0");
  const size_t dim = start.x.size();
  const auto force = [&](const std::vector<double>& x,
                         std::vector<double>& out) {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    const double r = std::sqrt(r2);
    const double coeff =
        s * std::pow(r, 2.0 * s - 2.0) - q_eval(m, r, 1) / r;
    for (size_t i = 0; i < dim; ++i) out[i] = coeff * x[i];
  };

  Trajectory traj;
  PhasePoint pt = start;
  std::vector<double> k1x(dim), k2x(dim), k3x(dim), k4x(dim);
  std::vector<double> k1v(dim), k2v(dim), k3v(dim), k4v(dim);
  std::vector<double> xt(dim);
  const int steps = int(std::ceil(t_max / dt));
  for (int step = 0; step <= steps; ++step) {
    const double t = step * dt;
    const double r = radius(pt);
    if (!(r < 1e150) || !std::isfinite(r)) {
      traj.complete = false;
      break;
    }
    traj.samples.push_back(
        {t, r, escape_g(s, r), h_value(m, s, pt), pt});
    if (step == steps) break;

    k1x = pt.xi;
    force(pt.x, k1v);
    for (size_t i = 0; i < dim; ++i) xt[i] = pt.x[i] + 0.5 * dt * k1x[i];
    for (size_t i = 0; i < dim; ++i) k2x[i] = pt.xi[i] + 0.5 * dt * k1v[i];
    force(xt, k2v);
    for (size_t i = 0; i < dim; ++i) xt[i] = pt.x[i] + 0.5 * dt * k2x[i];
    for (size_t i = 0; i < dim; ++i) k3x[i] = pt.xi[i] + 0.5 * dt * k2v[i];
    force(xt, k3v);
    for (size_t i = 0; i < dim; ++i) xt[i] = pt.x[i] + dt * k3x[i];
    for (size_t i = 0; i < dim; ++i) k4x[i] = pt.xi[i] + dt * k3v[i];
    force(xt, k4v);
    for (size_t i = 0; i < dim; ++i) {
      pt.x[i] += dt / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
      pt.xi[i] += dt / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
    }
  }
  return traj;
}

}  // namespace resfree
