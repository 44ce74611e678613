#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "resfree/cutoff.hpp"
#include "resfree/jet.hpp"

namespace resfree {

using Complex = std::complex<double>;

/// Parameters of the radial distortion r -> r_theta. The main use is
/// theta = i*beta with beta > 0; real theta is what the constructive inverse
/// handles. L_s bounds |theta| for invertibility of the real map.
struct DistortionParams {
  Complex theta;
  double s;  // exponent in (0, 1]
  int d;     // spatial dimension >= 2
  CutoffSpec cutoff;
  double L_s;
};

/// Largest real |theta| for which the forward map stays strictly increasing:
/// closed form (2s)^{-1} R^{2s} / L for s < 1; for s = 1 found by bisection,
/// monotonicity sampled on a log grid via the derivative of the radicand.
inline double admissible_theta_radius(const CutoffSpec& spec) {
  if (spec.s < 1.0)
    return std::pow(spec.R, 2.0 * spec.s) / (2.0 * spec.s * spec.L);

  // s = 1: w(r) = r^2 + 2 theta chi_R(r^2) log r must be strictly increasing.
  const auto increasing_for = [&spec](double theta) {
    constexpr int kSamples = 3000;
    const double lo = std::log(0.1), hi = std::log(1000.0 * spec.R);
    for (int sign : {-1, 1}) {
      const double th = sign * theta;
      for (int i = 0; i <= kSamples; ++i) {
        const double r = std::exp(lo + (hi - lo) * i / kSamples);
        const RJet rj = RJet::variable(r);
        const RJet t = rj * rj;
        const RJet chi = cutoff_jet(spec, t, t.value());
        const RJet w = t + (2.0 * th) * chi * log(rj);
        if (!(w.d1() > 0.0)) return false;
      }
    }
    return true;
  };

  double lo = 0.0, hi = 10.0 * spec.R * spec.R;
  while (increasing_for(hi)) hi *= 2.0;  // safe: fails once theta dominates
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (increasing_for(mid) ? lo : hi) = mid;
  }
  return lo;
}

inline DistortionParams make_distortion(Complex theta, double s, int d,
                                        double R) {
  if (d < 2) throw std::invalid_argument("distortion: dimension must be >= 2");
  if (s == 1.0 && R < 1.0)
    throw std::invalid_argument(
        "distortion: s = 1 requires R >= 1 (log r must be positive where the "
        "switch is active)");
  CutoffSpec spec = make_cutoff(R, s);
  const double L_s = admissible_theta_radius(spec);
  return DistortionParams{theta, s, d, spec, L_s};
}

namespace detail {

/// Radicand w(r) = r^{2s} + 2 s theta chi_R(r^{2s})           (s < 1)
///          w(r) = r^2   + 2 theta chi_R(r^2) log r           (s = 1)
/// as an order-3 jet in r, with the principal-branch guard.
inline CJet radicand_jet(const DistortionParams& p, double r) {
  if (!(r > 0.0))
    throw std::invalid_argument("distortion: r must be positive");
  const RJet rj = RJet::variable(r);
  CJet w;
  if (p.s < 1.0) {
    const RJet t = pow(rj, 2.0 * p.s);
    const CJet chi = cutoff_jet(p.cutoff, to_complex(t), t.value());
    w = to_complex(t) + (2.0 * p.s * p.theta) * chi;
  } else {
    const RJet t = rj * rj;
    const CJet chi = cutoff_jet(p.cutoff, to_complex(t), t.value());
    w = to_complex(t) + (2.0 * p.theta) * chi * to_complex(log(rj));
  }
  if (!(std::abs(std::arg(w.value())) < std::numbers::pi / 2.0))
    throw std::domain_error(
        "distortion: radicand left the principal half-plane (|arg| >= pi/2)");
  return w;
}

/// r_theta as an order-3 jet in r (principal 2s-th root of the radicand).
inline CJet r_theta_jet(const DistortionParams& p, double r) {
  return pow(radicand_jet(p, r), 1.0 / (2.0 * p.s));
}

}  // namespace detail

struct RThetaDerivs {
  Complex value, d1, d2;
};

inline RThetaDerivs r_theta_eval(const DistortionParams& p, double r) {
  const CJet j = detail::r_theta_jet(p, r);
  return {j.value(), j.d1(), j.d2()};
}

struct JacobianDerivs {
  Complex value, d1, d2;
};

/// J and its first two radial derivatives. The value uses the paper's direct
/// two-case formula; the derivatives come from the product form
/// J = (r_theta/r)^{d-1} * dr_theta/dr, so the factorization identity between
/// the two is a genuine cross-check rather than a tautology.
inline JacobianDerivs jacobian_eval(const DistortionParams& p, double r) {
  const CJet rth = detail::r_theta_jet(p, r);
  const CJet rj = to_complex(RJet::variable(r));
  const CJet ratio = rth / rj;
  const CJet jprod = pow(ratio, double(p.d - 1)) * rth.derivative();

  Complex value;
  const double t = (p.s < 1.0) ? std::pow(r, 2.0 * p.s) : r * r;
  if (p.s < 1.0) {
    const Complex factor =
        1.0 + 2.0 * p.s * p.theta * cutoff_eval(p.cutoff, t, 1);
    value = std::pow(ratio.value(), double(p.d) - 2.0 * p.s) * factor;
  } else {
    const Complex factor = 1.0 +
                           p.theta / (r * r) * cutoff_eval(p.cutoff, t, 0) +
                           2.0 * p.theta * std::log(r) *
                               cutoff_eval(p.cutoff, t, 1);
    value = std::pow(ratio.value(), double(p.d - 2)) * factor;
  }
  return {value, jprod.d1(), jprod.d2()};
}

/// phi(r), the zeroth-order coefficient produced by conjugating the radial
/// Laplacian with J^{1/2}:
///   phi = -(3/4) J^{-2} (J')^2 + (1/2) J^{-1} J''
///         - (1/2) J^{-1} (r_th')^{-1} r_th'' J'
///         + (1/2)(d-1) J^{-1} r_th' (r_th/r)^{-1} r^{-1} J'.
inline Complex phi_coeff(const DistortionParams& p, double r) {
  const JacobianDerivs J = jacobian_eval(p, r);
  const RThetaDerivs rt = r_theta_eval(p, r);
  const Complex Ji = 1.0 / J.value;
  return -0.75 * Ji * Ji * J.d1 * J.d1 + 0.5 * Ji * J.d2 -
         0.5 * Ji * (rt.d2 / rt.d1) * J.d1 +
         0.5 * (p.d - 1) * Ji * rt.d1 * (r / rt.value) / r * J.d1;
}

struct InversionResult {
  double r;
  int iterations;
};

/// Constructive inverse of the forward map for real theta, via the fixed
/// point iteration x_n = rt^{2s} - 2 s theta chi_R(x_{n-1}) in x = r^{2s}
/// (s = 1 analogue uses x = r^2 and the log factor). Contraction ratio is
/// 2 s |theta| R^{-2s} L < 1 on the admissible disc.
inline InversionResult invert_r_theta(const DistortionParams& p,
                                      double r_tilde, double tol = -1.0) {
  if (std::abs(p.theta.imag()) != 0.0)
    throw std::invalid_argument("invert_r_theta: theta must be real");
  const double theta = p.theta.real();
  if (!(std::abs(theta) < p.L_s))
    throw std::invalid_argument(
        "invert_r_theta: |theta| >= L_s violates the contraction bound");
  if (r_tilde < 0.0)
    throw std::invalid_argument("invert_r_theta: r_tilde must be >= 0");
  const double power = 2.0 * p.s;
  const double target = std::pow(r_tilde, power);
  if (tol <= 0.0) tol = 1e-14 * (1.0 + target);

  const auto shift = [&](double x) {
    // 2 s theta chi_R(x) for s < 1; theta chi_R(x) log x for s = 1 (with
    // x = r^2, log r = log(x)/2). The switch vanishes for small x, so the
    // log needs no special casing when R >= 1.
    if (x <= 0.0) return 0.0;
    const double chi = cutoff_eval(p.cutoff, x, 0);
    if (p.s < 1.0) return 2.0 * p.s * theta * chi;
    return chi == 0.0 ? 0.0 : theta * chi * std::log(x);
  };

  // Plain recurrence with Aitken delta-squared acceleration every two steps.
  // Near the edge of the admissible disc the linear ratio approaches one and
  // the bare recurrence would need more than the 200-iteration budget to
  // reach tol; the accelerated sequence converges superlinearly while each
  // accepted iterate still satisfies the same fixed-point equation at exit.
  double x = target;
  int it = 0;
  while (it < 200) {
    const double x1 = target - shift(x);
    ++it;
    if (std::abs(x1 - x) <= tol) return {std::pow(x1, 1.0 / power), it};
    const double x2 = target - shift(x1);
    ++it;
    if (std::abs(x2 - x1) <= tol) return {std::pow(x2, 1.0 / power), it};
    const double denom = x2 - 2.0 * x1 + x;
    x = std::abs(denom) > 1e-300 ? x - (x1 - x) * (x1 - x) / denom : x2;
  }
  throw std::runtime_error("invert_r_theta: iteration cap (200) exceeded");
}

}  // namespace resfree
