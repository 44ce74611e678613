#pragma once

#include <chrono>
#include <complex>
#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "resfree/classical.hpp"
#include "resfree/config.hpp"
#include "resfree/io.hpp"
#include "resfree/spectral.hpp"
#include "resfree/virial.hpp"

namespace resfree {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunContext {
  RunConfig cfg;
  std::filesystem::path out_dir;
  int threads = 1;
  long seed = 42;
};

namespace runjson {

using nlohmann::json;

inline json window(const VirialWindow& w) {
  return {{"E", w.E},          {"mu", w.mu},
          {"alpha", w.alpha},  {"gamma", w.gamma},
          {"r_inner", w.r_inner}, {"r_outer", w.r_outer},
          {"R", w.R},          {"s", w.s}};
}

inline json certificate(const WindowCertificate& c) {
  return {{"cond_i", c.cond_i},
          {"cond_ii", c.cond_ii},
          {"cond_iii", c.cond_iii},
          {"tail_ok", c.tail_ok},
          {"pass", c.pass},
          {"min_forbidden", c.min_forbidden},
          {"min_virial", c.min_virial},
          {"tail_limit", c.tail_limit}};
}

inline json base_result(const RunContext& ctx, double elapsed_ms) {
  return {{"tool_version", kToolVersion},
          {"seed", ctx.seed},
          {"threads", ctx.threads},
          {"elapsed_ms", elapsed_ms},
          {"config_echo", ctx.cfg.echo}};
}

}  // namespace runjson

namespace detail {

/// Window from the section-3 recipe (zero family) with config overrides for
/// mu and R folded in.
inline WindowResult resolve_window(const RunConfig& cfg) {
  WindowResult res =
      free_case_window(cfg.s, cfg.E, cfg.mu ? *cfg.mu : -1.0);
  if (res.accepted && cfg.R) res.window.R = *cfg.R;
  return res;
}

inline ScanRect resolve_rect(const RunConfig& cfg, const VirialWindow& w) {
  const double center_im = -cfg.beta * w.mu;
  ScanRect rect;
  rect.re_min = cfg.re_min.value_or(cfg.E - cfg.beta * w.gamma);
  rect.re_max = cfg.re_max.value_or(cfg.E + cfg.beta * w.gamma);
  rect.im_min = cfg.im_min.value_or(center_im - 0.5 * cfg.beta * w.mu);
  rect.im_max = cfg.im_max.value_or(center_im + 0.5 * cfg.beta * w.mu);
  rect.n_re = cfg.n_re;
  rect.n_im = cfg.n_im;
  return rect;
}

struct Timer {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start)
        .count();
  }
};

}  // namespace detail

/// Full certification pipeline: section-3 window, grid validation of the
/// theorem hypotheses, operator assembly, coercivity scan, eigenvalue table.
/// Exit: 0 pass, 2 certificate failure.
inline int cmd_certify(const RunContext& ctx) {
  using nlohmann::json;
  const detail::Timer timer;
  const RunConfig& cfg = ctx.cfg;
  std::filesystem::create_directories(ctx.out_dir);

  const WindowResult wres = detail::resolve_window(cfg);
  if (!wres.accepted) {
    json out = runjson::base_result(ctx, timer.ms());
    out["pass"] = false;
    out["rejection"] = wres.reason;
    write_text(ctx.out_dir / "certificate.json", out.dump(2) + "\n");
    return 2;
  }
  const VirialWindow& w = wres.window;

  const RadialGrid grid(cfg.r_min, cfg.r_max, cfg.n, cfg.d);
  const WindowCertificate cert = validate_window(cfg.model, w, grid);
  const DistortionParams p =
      make_distortion(Complex(0.0, cfg.beta), cfg.s, cfg.d, w.R);

  const ScanRect rect = detail::resolve_rect(cfg, w);
  const double line = ess_line(cfg.s, cfg.beta);
  const bool near_ess_line =
      line >= rect.im_min - 0.05 * cfg.beta &&
      line <= rect.im_max + 0.05 * cfg.beta;

  double min_sigma = std::numeric_limits<double>::infinity();
  Complex argmin{};
  json eigen_table = json::array();
  json candidates = json::array();
  for (double ell_d : cfg.sectors) {
    const int ell = int(ell_d);
    const SectorOperator op =
        assemble_h_theta(grid, ell, p, cfg.model, cfg.hbar);
    const SpectralScan scan = coercivity_scan(op, rect, ctx.threads);
    if (scan.min_sigma < min_sigma) {
      min_sigma = scan.min_sigma;
      argmin = scan.argmin;
    }
    for (const EigenvalueEntry& e : eigenvalues(op)) {
      eigen_table.push_back({{"value_re", e.value.real()},
                             {"value_im", e.value.imag()},
                             {"boundary_mass", e.boundary_mass},
                             {"ell", ell}});
      const bool in_strip = std::abs(e.value.real() - cfg.E) <= 0.2 &&
                            e.value.imag() < 0.0 &&
                            e.value.imag() >= -1.5 * cfg.beta * w.mu;
      if (in_strip && e.boundary_mass < 0.01)
        candidates.push_back({{"value_re", e.value.real()},
                              {"value_im", e.value.imag()},
                              {"boundary_mass", e.boundary_mass},
                              {"ell", ell}});
    }
  }

  const bool pass = cert.pass && min_sigma > 0.0 && !near_ess_line;
  json out = runjson::base_result(ctx, timer.ms());
  out["pass"] = pass;
  out["window"] = runjson::window(w);
  out["certificate"] = runjson::certificate(cert);
  out["scan"] = {{"min_sigma", min_sigma},
                 {"argmin_re", argmin.real()},
                 {"argmin_im", argmin.imag()},
                 {"re_min", rect.re_min},
                 {"re_max", rect.re_max},
                 {"im_min", rect.im_min},
                 {"im_max", rect.im_max},
                 {"n_re", rect.n_re},
                 {"n_im", rect.n_im}};
  out["coercivity_scale"] = std::min(w.alpha, cfg.beta * w.gamma);
  out["essential_line"] = line;
  if (near_ess_line)
    out["diagnostic"] =
        "essential-line proximity: the scan rectangle touches Im z = " +
        format_g17(line);
  out["eigenvalues"] = eigen_table;
  out["resonance_candidates"] = candidates;
  write_text(ctx.out_dir / "certificate.json", out.dump(2) + "\n");
  return pass ? 0 : 2;
}

/// sigma_min over the z rectangle -> scan.csv (re_z,im_z,sigma_min) and a
/// JSON summary.
inline int cmd_scan(const RunContext& ctx) {
  using nlohmann::json;
  const detail::Timer timer;
  const RunConfig& cfg = ctx.cfg;
  std::filesystem::create_directories(ctx.out_dir);

  const WindowResult wres = detail::resolve_window(cfg);
  if (!wres.accepted) throw ConfigError("scan: " + wres.reason);
  const VirialWindow& w = wres.window;
  const RadialGrid grid(cfg.r_min, cfg.r_max, cfg.n, cfg.d);
  const DistortionParams p =
      make_distortion(Complex(0.0, cfg.beta), cfg.s, cfg.d, w.R);
  const ScanRect rect = detail::resolve_rect(cfg, w);

  // Minimum across sectors at each grid point.
  std::vector<double> merged;
  std::vector<Complex> z_grid;
  for (size_t si = 0; si < cfg.sectors.size(); ++si) {
    const SectorOperator op = assemble_h_theta(
        grid, int(cfg.sectors[si]), p, cfg.model, cfg.hbar);
    const SpectralScan scan = coercivity_scan(op, rect, ctx.threads);
    if (si == 0) {
      merged = scan.sigma;
      z_grid = scan.z_grid;
    } else {
      for (size_t k = 0; k < merged.size(); ++k)
        merged[k] = std::min(merged[k], scan.sigma[k]);
    }
  }

  std::vector<std::vector<double>> rows;
  rows.reserve(z_grid.size());
  double min_sigma = std::numeric_limits<double>::infinity();
  Complex argmin{};
  for (size_t k = 0; k < z_grid.size(); ++k) {
    rows.push_back({z_grid[k].real(), z_grid[k].imag(), merged[k]});
    if (merged[k] < min_sigma) {
      min_sigma = merged[k];
      argmin = z_grid[k];
    }
  }
  write_csv(ctx.out_dir / "scan.csv", {"re_z", "im_z", "sigma_min"}, rows);

  json out = runjson::base_result(ctx, timer.ms());
  out["window"] = runjson::window(w);
  out["min_sigma"] = min_sigma;
  out["argmin_re"] = argmin.real();
  out["argmin_im"] = argmin.imag();
  out["rows"] = rows.size();
  write_text(ctx.out_dir / "scan_summary.json", out.dump(2) + "\n");
  return 0;
}

/// Weyl-sequence residual table -> weyl.csv (lambda,n,residual).
inline int cmd_weyl(const RunContext& ctx) {
  using nlohmann::json;
  const detail::Timer timer;
  const RunConfig& cfg = ctx.cfg;
  std::filesystem::create_directories(ctx.out_dir);

  const double R = cfg.R.value_or(1.0);
  const DistortionParams p =
      make_distortion(Complex(0.0, cfg.beta), cfg.s, cfg.d, R);
  const WeylPhase phase =
      cfg.weyl_phase == "integral" ? WeylPhase::integral : WeylPhase::none;

  std::vector<std::vector<double>> rows;
  for (double lambda : cfg.weyl_lambda) {
    for (double n_d : cfg.weyl_n) {
      WeylSpec spec{cfg.s, lambda, int(n_d), cfg.hbar, cfg.model, phase};
      rows.push_back({lambda, n_d, weyl_residual(spec, p, cfg.d)});
    }
  }
  write_csv(ctx.out_dir / "weyl.csv", {"lambda", "n", "residual"}, rows);

  json out = runjson::base_result(ctx, timer.ms());
  out["essential_line"] = ess_line(cfg.s, cfg.beta);
  out["rows"] = rows.size();
  write_text(ctx.out_dir / "weyl_summary.json", out.dump(2) + "\n");
  return 0;
}

/// Classical trajectory -> trajectory.csv (t,r,g,h).
inline int cmd_classical(const RunContext& ctx) {
  using nlohmann::json;
  const detail::Timer timer;
  const RunConfig& cfg = ctx.cfg;
  std::filesystem::create_directories(ctx.out_dir);

  const Trajectory traj = integrate_trajectory(
      cfg.model, cfg.s, PhasePoint{cfg.x0, cfg.xi0}, cfg.t_max, cfg.dt);
  std::vector<std::vector<double>> rows;
  rows.reserve(traj.samples.size());
  for (const TrajectorySample& smp : traj.samples)
    rows.push_back({smp.t, smp.r, smp.g, smp.h});
  write_csv(ctx.out_dir / "trajectory.csv", {"t", "r", "g", "h"}, rows);

  json out = runjson::base_result(ctx, timer.ms());
  out["complete"] = traj.complete;
  out["rows"] = rows.size();
  write_text(ctx.out_dir / "trajectory_summary.json", out.dump(2) + "\n");
  return 0;
}

/// Distortion table over the grid -> distortion.csv.
inline int cmd_distort(const RunContext& ctx) {
  using nlohmann::json;
  const detail::Timer timer;
  const RunConfig& cfg = ctx.cfg;
  std::filesystem::create_directories(ctx.out_dir);

  const double R = cfg.R.value_or(1.0);
  const DistortionParams p =
      make_distortion(Complex(0.0, cfg.beta), cfg.s, cfg.d, R);
  const RadialGrid grid(cfg.r_min, cfg.r_max, cfg.n, cfg.d);

  std::vector<std::vector<double>> rows;
  rows.reserve(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double r = grid.r(i);
    const RThetaDerivs rt = r_theta_eval(p, r);
    const JacobianDerivs J = jacobian_eval(p, r);
    const Complex phi = phi_coeff(p, r);
    rows.push_back({r, rt.value.real(), rt.value.imag(), rt.d1.real(),
                    rt.d1.imag(), rt.d2.real(), rt.d2.imag(), J.value.real(),
                    J.value.imag(), phi.real(), phi.imag()});
  }
  write_csv(ctx.out_dir / "distortion.csv",
            {"r", "rtheta_re", "rtheta_im", "drtheta_re", "drtheta_im",
             "d2rtheta_re", "d2rtheta_im", "jacobian_re", "jacobian_im",
             "phi_re", "phi_im"},
            rows);

  json out = runjson::base_result(ctx, timer.ms());
  out["L_s"] = p.L_s;
  out["cutoff_L"] = p.cutoff.L;
  out["rows"] = rows.size();
  write_text(ctx.out_dir / "distortion_summary.json", out.dump(2) + "\n");
  return 0;
}

/// Window construction + hypothesis check only -> virial.json.
inline int cmd_virial(const RunContext& ctx) {
  using nlohmann::json;
  const detail::Timer timer;
  const RunConfig& cfg = ctx.cfg;
  std::filesystem::create_directories(ctx.out_dir);

  const WindowResult wres = detail::resolve_window(cfg);
  json out = runjson::base_result(ctx, timer.ms());
  if (!wres.accepted) {
    out["pass"] = false;
    out["rejection"] = wres.reason;
    write_text(ctx.out_dir / "virial.json", out.dump(2) + "\n");
    return 2;
  }
  const RadialGrid grid(cfg.r_min, cfg.r_max, cfg.n, cfg.d);
  const WindowCertificate cert = validate_window(cfg.model, wres.window, grid);
  out["pass"] = cert.pass;
  out["window"] = runjson::window(wres.window);
  out["certificate"] = runjson::certificate(cert);
  write_text(ctx.out_dir / "virial.json", out.dump(2) + "\n");
  return cert.pass ? 0 : 2;
}

}  // namespace resfree
