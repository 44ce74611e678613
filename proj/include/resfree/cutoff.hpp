#pragma once

#include <cmath>
#include <stdexcept>

#include "resfree/jet.hpp"

namespace resfree {

// C^inf switch chi1: 0 for t <= 1, 1 for t >= 2, built from the standard
// exponential bump phi(x) = exp(-1/x). All orders of derivatives vanish at
// the junctions, which is what the third-derivative terms of the distorted
// operator require.

namespace detail {

template <class T>
Jet<T> bump(const Jet<T>& x) {
  // exp(-1/x) for Re x > 0; caller guarantees positivity of the value.
  return exp(-recip(x));
}

}  // namespace detail

/// chi1 and its first three derivatives at t.
inline RJet chi1_jet(double t) {
  if (t <= 1.0) return RJet(0.0);
  if (t >= 2.0) return RJet(1.0);
  const RJet tj = RJet::variable(t);
  const RJet a = detail::bump(tj - 1.0);
  const RJet b = detail::bump(2.0 - tj);
  return a / (a + b);
}

inline double chi1(double t) { return chi1_jet(t).value(); }

/// Smooth switch chi_R(t) = chi1(t / R^{2s}) with its scale and the sampled
/// Lipschitz constant of chi1.
struct CutoffSpec {
  const char* kind = "exp-switch";
  double R;  // scale radius > 0
  double s;  // exponent in (0, 1]
  double L;  // Lipschitz constant of chi1, from dense derivative sampling
};

inline CutoffSpec make_cutoff(double R, double s) {
  if (!(R > 0.0)) throw std::invalid_argument("cutoff: R must be positive");
  if (!(s > 0.0 && s <= 1.0))
    throw std::invalid_argument("cutoff: s must lie in (0, 1]");
  // sup |chi1'| over a dense grid of [1, 2]; 2^12 intervals include the
  // symmetry point t = 1.5 where the maximum sits.
  constexpr int kSamples = 4096;
  double L = 0.0;
  for (int i = 0; i <= kSamples; ++i) {
    const double t = 1.0 + double(i) / kSamples;
    L = std::max(L, std::abs(chi1_jet(t).d1()));
  }
  return CutoffSpec{"exp-switch", R, s, L};
}

/// k-th derivative of chi_R at t (k in 0..3).
inline double cutoff_eval(const CutoffSpec& spec, double t, int order) {
  if (order < 0 || order > 3)
    throw std::invalid_argument("cutoff_eval: order must be in 0..3");
  const double scale = std::pow(spec.R, 2.0 * spec.s);
  const RJet c = chi1_jet(t / scale);
  return c.v[order] / std::pow(scale, order);
}

/// chi_R as a jet in an arbitrary scalar, seeded by a jet of t. Used by the
/// distortion map where t = r^{2s} (or r^2) carries derivatives in r.
template <class T>
Jet<T> cutoff_jet(const CutoffSpec& spec, const Jet<T>& t, double t_value) {
  const double scale = std::pow(spec.R, 2.0 * spec.s);
  const RJet c = chi1_jet(t_value / scale);
  const double s1 = 1.0 / scale;
  return compose(T(c.v[0]), T(c.v[1] * s1), T(c.v[2] * s1 * s1),
                 T(c.v[3] * s1 * s1 * s1), t);
}

}  // namespace resfree
