#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "resfree/distortion.hpp"
#include "resfree/jet.hpp"

namespace resfree {

enum class PotentialFamily { zero, power_decay, log_decay };

inline PotentialFamily potential_family_from_string(const std::string& name) {
  if (name == "zero") return PotentialFamily::zero;
  if (name == "power-decay") return PotentialFamily::power_decay;
  if (name == "log-decay") return PotentialFamily::log_decay;
  throw std::invalid_argument("unknown potential family: " + name);
}

inline const char* to_string(PotentialFamily f) {
  switch (f) {
    case PotentialFamily::zero: return "zero";
    case PotentialFamily::power_decay: return "power-decay";
    case PotentialFamily::log_decay: return "log-decay";
  }
  return "?";
}

/// Closed-form perturbation families:
///   power-decay (s < 1):  q = kappa * <r>^{2s - rho}
///   log-decay   (s = 1):  q = kappa * (log<r> + 1)^{-1-rho} * <r>^2
/// with <r> = (1 + r^2)^{1/2}. Both are long-range admissible for
/// rho in (0, 1) and extend to complex radius on the principal branches.
struct PotentialModel {
  PotentialFamily family = PotentialFamily::zero;
  double kappa = 0.0;
  double rho = 0.3;
  double s = 0.5;
  double beta0 = 0.5;  // declared analyticity width (branch guard only)
};

namespace detail {

/// q at a scalar radius of arbitrary type (double, complex, jets thereof).
template <class S>
S q_generic(const PotentialModel& m, const S& r) {
  switch (m.family) {
    case PotentialFamily::zero:
      return S(0.0) * r;  // keep jet shape, value identically 0
    case PotentialFamily::power_decay: {
      using resfree::pow;
      using std::pow;
      return S(m.kappa) * pow(r * r + S(1.0), (2.0 * m.s - m.rho) / 2.0);
    }
    case PotentialFamily::log_decay: {
      using resfree::log;
      using resfree::pow;
      using resfree::sqrt;
      using std::log;
      using std::pow;
      using std::sqrt;
      const S bracket = r * r + S(1.0);
      return S(m.kappa) * pow(log(sqrt(bracket)) + S(1.0), -1.0 - m.rho) *
             bracket;
    }
  }
  return S(0.0);
}

}  // namespace detail

inline RJet q_jet(const PotentialModel& m, double r) {
  return detail::q_generic(m, RJet::variable(r));
}

/// order-th radial derivative of q (order in 0..3).
inline double q_eval(const PotentialModel& m, double r, int order) {
  if (order < 0 || order > 3)
    throw std::invalid_argument("q_eval: order must be in 0..3");
  return q_jet(m, r).v[order];
}

/// q at the complex distorted radius r_theta (principal branches).
inline Complex q_theta_eval(const PotentialModel& m, const DistortionParams& p,
                            double r) {
  if (!(std::abs(p.theta.imag()) < m.beta0))
    throw std::invalid_argument(
        "q_theta_eval: |Im theta| must stay below the declared width beta0");
  const Complex rth = r_theta_eval(p, r).value;
  const Complex bracket = rth * rth + 1.0;
  if (!(bracket.real() > 0.0))
    throw std::domain_error("q_theta_eval: <r_theta> crossed the branch cut");
  if (m.family == PotentialFamily::log_decay) {
    const Complex lg = std::log(std::sqrt(bracket)) + 1.0;
    if (!(lg.real() > 0.0))
      throw std::domain_error("q_theta_eval: log<r_theta>+1 left the branch");
  }
  return detail::q_generic(m, rth);
}

struct QThetaTaylor {
  double zeroth;  // q(r)
  double first;   // coefficient of theta in q_theta = q + theta * (...) + ...
};

/// First-order expansion of q_theta in theta:
///   s < 1:  q_theta = q + theta r^{1-2s} chi_R(r^{2s}) q'(r) + O(theta^2)
///   s = 1:  q_theta = q + theta r^{-1} log r chi_R(r^2) q'(r) + O(theta^2)
inline QThetaTaylor q_theta_taylor(const PotentialModel& m,
                                   const DistortionParams& p, double r) {
  const double q0 = q_eval(m, r, 0);
  const double q1 = q_eval(m, r, 1);
  double first;
  if (p.s < 1.0) {
    const double chi = cutoff_eval(p.cutoff, std::pow(r, 2.0 * p.s), 0);
    first = std::pow(r, 1.0 - 2.0 * p.s) * chi * q1;
  } else {
    const double chi = cutoff_eval(p.cutoff, r * r, 0);
    first = chi == 0.0 ? 0.0 : std::log(r) / r * chi * q1;
  }
  return {q0, first};
}

struct LongRangeReport {
  bool pass = true;
  std::vector<double> constants;          // best C_k per order
  std::vector<double> refined_constants;  // same on the midpoint-doubled grid
};

/// Envelope for the k-th derivative bound of Condition-type decay:
///   s < 1:  <r>^{2s - k - rho};  s = 1:  (log<r>)^{-1-rho} <r>^{2-k}.
inline double decay_envelope(const PotentialModel& m, int k, double r) {
  const double br = std::sqrt(1.0 + r * r);
  if (m.s < 1.0) return std::pow(br, 2.0 * m.s - k - m.rho);
  const double lg = std::log(br);
  if (lg == 0.0) return std::numeric_limits<double>::infinity();
  return std::pow(lg, -1.0 - m.rho) * std::pow(br, 2.0 - k);
}

/// sup over the grid of |q^(k)| / envelope_k, for k = 0..k_max, plus the same
/// on the grid with midpoints inserted; pass iff finite and the refinement
/// moves each constant by < 5%.
inline LongRangeReport condition_long_range_check(
    const PotentialModel& m, int k_max, const std::vector<double>& grid) {
  if (k_max > 3)
    throw std::invalid_argument("condition_long_range_check: k_max <= 3");
  LongRangeReport report;
  const auto sup_on = [&](const std::vector<double>& pts, int k) {
    double best = 0.0;
    for (double r : pts) {
      const double env = decay_envelope(m, k, r);
      if (!std::isfinite(env)) continue;
      best = std::max(best, std::abs(q_eval(m, r, k)) / env);
    }
    return best;
  };
  std::vector<double> refined;
  refined.reserve(grid.size() * 2);
  for (size_t i = 0; i < grid.size(); ++i) {
    refined.push_back(grid[i]);
    if (i + 1 < grid.size()) refined.push_back(0.5 * (grid[i] + grid[i + 1]));
  }
  for (int k = 0; k <= k_max; ++k) {
    const double c = sup_on(grid, k);
    const double cr = sup_on(refined, k);
    report.constants.push_back(c);
    report.refined_constants.push_back(cr);
    if (!std::isfinite(cr)) report.pass = false;
    if (c > 0.0 && cr / c >= 1.05) report.pass = false;
  }
  return report;
}

}  // namespace resfree
