// Command-line driver: certify / scan / weyl / classical / distort / virial.
// Exit codes: 0 pass, 2 certificate failure, 3 validation error,
// 4 numerical failure.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <string>

#include "resfree/run.hpp"

namespace {

int resolve_threads(int cli_threads) {
  if (const char* env = std::getenv("RESFREE_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
      // fall through to the CLI value
    }
  }
  return cli_threads > 0 ? cli_threads : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"resonance-free region certification for distorted repulsive "
               "Schrodinger operators"};
  app.require_subcommand(1);
  app.set_version_flag("--version", resfree::kToolVersion);

  std::string config_path;
  std::string out_dir = "out";
  int threads = 1;
  long seed = -1;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "run configuration (TOML)")
        ->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads,
                    "worker threads (env RESFREE_THREADS overrides)");
    sub->add_option("--seed", seed, "seed override for randomized suites");
    return sub;
  };

  CLI::App* certify = add_common(app.add_subcommand(
      "certify", "virial window + coercivity scan, end to end"));
  CLI::App* scan = add_common(
      app.add_subcommand("scan", "sigma_min over a z rectangle -> CSV"));
  CLI::App* weyl = add_common(app.add_subcommand(
      "weyl", "essential-spectrum witness residual table -> CSV"));
  CLI::App* classical = add_common(app.add_subcommand(
      "classical", "classical trajectory of the repulsive flow -> CSV"));
  CLI::App* distort = add_common(app.add_subcommand(
      "distort", "distortion map / Jacobian table over the grid -> CSV"));
  CLI::App* virial = add_common(app.add_subcommand(
      "virial", "window construction and hypothesis check -> JSON"));

  CLI11_PARSE(app, argc, argv);

  try {
    resfree::RunContext ctx;
    ctx.cfg = resfree::RunConfig::from_file(config_path);
    ctx.out_dir = out_dir;
    ctx.threads = resolve_threads(threads > 0 ? threads : ctx.cfg.threads);
    ctx.seed = seed >= 0 ? seed : ctx.cfg.seed;

    if (certify->parsed()) return resfree::cmd_certify(ctx);
    if (scan->parsed()) return resfree::cmd_scan(ctx);
    if (weyl->parsed()) return resfree::cmd_weyl(ctx);
    if (classical->parsed()) return resfree::cmd_classical(ctx);
    if (distort->parsed()) return resfree::cmd_distort(ctx);
    if (virial->parsed()) return resfree::cmd_virial(ctx);
  } catch (const resfree::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
