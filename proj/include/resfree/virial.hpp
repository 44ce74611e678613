#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "resfree/cutoff.hpp"
#include "resfree/grid.hpp"
#include "resfree/potential.hpp"

namespace resfree {

/// Condition (ii) integrand: -1/2 r^{2s} + q(r) - E (>= alpha on supp chi).
inline double forbidden_margin(const PotentialModel& m, double E, double r) {
  return -0.5 * std::pow(r, 2.0 * m.s) + q_eval(m, r, 0) - E;
}

/// Condition (iii) integrand minus mu:
///   s < 1:  1 - s - 2(1-2s) r^{-2s}(q - E) - r^{1-2s} q' - mu
///   s = 1:  1 + 2 r^{-2}(log r - 1)(q - E) - r^{-1} log r q' - mu
inline double virial_margin(const PotentialModel& m, double E, double mu,
                            double r) {
  if (!(r > 0.0)) throw std::invalid_argument("virial_margin: r must be > 0");
  const double q = q_eval(m, r, 0);
  const double qp = q_eval(m, r, 1);
  if (m.s < 1.0) {
    return 1.0 - m.s -
           2.0 * (1.0 - 2.0 * m.s) * std::pow(r, -2.0 * m.s) * (q - E) -
           std::pow(r, 1.0 - 2.0 * m.s) * qp - mu;
  }
  const double lg = std::log(r);
  return 1.0 + 2.0 / (r * r) * (lg - 1.0) * (q - E) - lg / r * qp - mu;
}

/// Certified parameter window for the coercivity theorem: scan center
/// z = E - i beta mu, forbidden-region partition radii, and the distortion
/// scale R keeping chi_R == 1 on supp(chi-tilde).
struct VirialWindow {
  double E;
  double mu;
  double alpha;
  double gamma;
  double r_inner;  // chi == 1 below
  double r_outer;  // chi-tilde == 1 above
  double R;
  double s;
};

struct WindowResult {
  bool accepted = false;
  VirialWindow window{};
  std::string reason;  // set on rejection
};

/// The free-case (q = 0) constructions, one per regime. Pass mu <= 0 for the
/// mid-interval default. Returned windows are meant to be fed through
/// validate_window; for s = 1 with E in (-e/2, -1/2) the construction cannot
/// satisfy the r_inner >= sqrt(e) support constraint (the forbidden region
/// ends below sqrt(e)) and validation reports that honestly.
inline WindowResult free_case_window(double s, double E, double mu = -1.0) {
  const auto reject = [](std::string why) {
    WindowResult r;
    r.reason = std::move(why);
    return r;
  };

  if (s < 1.0) {
    if (!(E < 0.0)) return reject("s < 1 requires E < 0");
    const double two_s = 2.0 * s;
    if (s >= 0.5) {
      const double cap = 1.0 - s;
      if (mu <= 0.0) mu = cap / 2.0;
      if (!(mu < cap)) return reject("mu must stay below 1 - s");
      const double gamma = (1.0 - s - mu) / 2.0;
      const double alpha = -E / 2.0;
      const double r_outer = std::pow(2.0 * (-E - alpha), 1.0 / two_s);
      // -1/2 r^{2s} - E = 2 alpha marks the natural inner radius; at the
      // mid-choice alpha = -E/2 that level sits at r = 0, so fall back to
      // half the outer radius.
      const double lvl = 2.0 * (-E - 2.0 * alpha);
      const double r_inner =
          std::max(lvl > 0.0 ? std::pow(lvl, 1.0 / two_s) : 0.0,
                   r_outer / 2.0);
      const double R = 0.99 * r_inner * std::pow(2.0, -1.0 / two_s);
      return {true, {E, mu, alpha, gamma, r_inner, r_outer, R, s}, ""};
    }
    // s < 1/2: the margin dips below its r -> infinity limit 1 - s - mu at
    // finite r; push r_inner out far enough that the dip stays above gamma.
    const double cap = s;
    if (mu <= 0.0) mu = cap / 2.0;
    if (!(mu < cap)) return reject("mu must stay below s for s < 1/2");
    const double k = (1.0 - 2.0 * s) / (1.0 - s - mu);  // k < 1 iff mu < s
    const double alpha_max = -E * (1.0 - k);
    const double alpha = alpha_max / 2.0;
    const double c_lo = k * E / (E + alpha);
    const double c = (c_lo + 1.0) / 2.0;
    const double r_inner = std::pow(2.0 * c * (-E - alpha), 1.0 / two_s);
    const double r_outer = std::pow(2.0 * (-E - alpha), 1.0 / two_s);
    const double margin_min = 1.0 - s - mu -
                              2.0 * (1.0 - 2.0 * s) * (-E) /
                                  std::pow(r_inner, two_s);
    const double gamma = margin_min / 2.0;
    const double R = 0.99 * r_inner * std::pow(2.0, -1.0 / two_s);
    return {true, {E, mu, alpha, gamma, r_inner, r_outer, R, s}, ""};
  }

  // s = 1
  if (!(E < -0.5)) return reject("s = 1 requires E < -1/2");
  const double e1 = std::numbers::e;
  const double cap = std::min(1.0, 0.5 * std::log(-2.0 * E));
  if (mu <= 0.0) mu = (E < -0.5 * e1 * e1) ? 0.5 : cap / 2.0;
  if (!(mu < cap))
    return reject("mu must stay below min{1, (1/2)log(-2E)}");

  // Initial alpha: small enough that r_inner = sqrt(2(-E - 2 alpha)) clears
  // sqrt(e) whenever the forbidden region allows it at all.
  double alpha;
  if (E < -0.5 * e1 * e1) {
    alpha = -(2.0 * E + e1 * e1) / 8.0;
  } else if (E < -0.5 * e1) {
    alpha = 0.5 * std::min(-(2.0 * E + 1.0) / 4.0, (-2.0 * E - e1) / 4.0);
  } else {
    alpha = -(2.0 * E + 1.0) / 8.0;  // (i) unattainable here; see validate
  }

  // psi(r) = 1 + 2(-E) r^{-2}(log r - 1) rises to r = e^{3/2} then decays to
  // 1, so its infimum over [r_inner, inf) is min(psi(r_inner), 1). Shrink
  // alpha until the margin clears zero (guaranteed for mu below the cap).
  const auto psi = [E](double r) {
    return 1.0 + 2.0 * (-E) / (r * r) * (std::log(r) - 1.0);
  };
  double r_inner = 0.0, margin_min = -1.0;
  for (int it = 0; it < 60 && margin_min <= 0.0; ++it) {
    r_inner = std::sqrt(2.0 * (-E - 2.0 * alpha));
    margin_min = std::min(psi(r_inner), 1.0) - mu;
    if (margin_min <= 0.0) alpha *= 0.5;
  }
  if (margin_min <= 0.0)
    return reject("no alpha kept the virial margin positive");
  const double gamma = margin_min / 2.0;
  const double r_outer = std::sqrt(2.0 * (-E - alpha));
  const double R = std::max(1.0, 0.99 * r_inner / std::sqrt(2.0));
  return {true, {E, mu, alpha, gamma, r_inner, r_outer, R, 1.0}, ""};
}

struct Partition {
  std::vector<double> chi;
  std::vector<double> chi_tilde;
  std::vector<double> chi_prime;
};

/// chi = cos(pi sigma / 2), chi-tilde = sin(pi sigma / 2) with sigma the
/// smooth switch rescaled to [r_inner, r_outer]: chi^2 + chi~^2 = 1 is an
/// algebraic identity and both factors are C-infinity (sigma is flat at the
/// junctions).
inline Partition build_partition(const VirialWindow& w,
                                 const std::vector<double>& radii) {
  if (!(w.r_inner < w.r_outer))
    throw std::invalid_argument("build_partition: need r_inner < r_outer");
  Partition part;
  part.chi.reserve(radii.size());
  part.chi_tilde.reserve(radii.size());
  part.chi_prime.reserve(radii.size());
  const double span = w.r_outer - w.r_inner;
  const double half_pi = std::numbers::pi / 2.0;
  for (double r : radii) {
    const RJet sigma = chi1_jet(1.0 + (r - w.r_inner) / span);
    const double arg = half_pi * sigma.value();
    part.chi.push_back(std::cos(arg));
    part.chi_tilde.push_back(std::sin(arg));
    part.chi_prime.push_back(-half_pi * sigma.d1() / span * std::sin(arg));
  }
  return part;
}

struct WindowCertificate {
  bool cond_i = false;    // support/geometry constraints incl. chi_R == 1
  bool cond_ii = false;   // forbidden margin >= alpha on supp chi
  bool cond_iii = false;  // virial margin >= gamma on supp chi-tilde (grid)
  bool tail_ok = false;   // analytic r -> infinity margin limit >= gamma
  bool pass = false;
  double min_forbidden = 0.0;
  double min_virial = 0.0;
  double tail_limit = 0.0;
};

/// Grid check of the theorem hypotheses, plus the analytic tail criterion
/// (supp chi-tilde is unbounded; the decay bookkeeping of the supported
/// families gives margin -> 1 - s - mu resp. 1 - mu).
inline WindowCertificate validate_window(const PotentialModel& m,
                                         const VirialWindow& w,
                                         const RadialGrid& grid) {
  WindowCertificate cert;
  const double tol = 1e-9 * (1.0 + std::abs(w.alpha) + std::abs(w.gamma));

  bool geometry = w.alpha > 0.0 && w.gamma > 0.0 && w.mu > 0.0 &&
                  w.r_inner > 0.0 && w.r_inner < w.r_outer;
  // chi_R == 1 on [r_inner, inf): the switch saturates at t >= 2 R^{2s}.
  const double two_s = 2.0 * w.s;
  geometry = geometry && std::pow(w.r_inner, two_s) >=
                             2.0 * std::pow(w.R, two_s) - 1e-12;
  if (w.s == 1.0)
    geometry = geometry && w.r_inner >= std::sqrt(std::numbers::e) - 1e-12;
  cert.cond_i = geometry;

  double min_forbidden = std::numeric_limits<double>::infinity();
  double min_virial = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.n; ++i) {
    const double r = grid.r(i);
    if (r <= w.r_outer)
      min_forbidden = std::min(min_forbidden, forbidden_margin(m, w.E, r));
    if (r >= w.r_inner)
      min_virial = std::min(min_virial, virial_margin(m, w.E, w.mu, r));
  }
  cert.min_forbidden = min_forbidden;
  cert.min_virial = min_virial;
  cert.cond_ii = min_forbidden >= w.alpha - tol;
  cert.cond_iii = min_virial >= w.gamma - tol;

  cert.tail_limit = (w.s < 1.0 ? 1.0 - w.s : 1.0) - w.mu;
  cert.tail_ok = cert.tail_limit >= w.gamma - tol;

  cert.pass = cert.cond_i && cert.cond_ii && cert.cond_iii && cert.tail_ok;
  return cert;
}

}  // namespace resfree
