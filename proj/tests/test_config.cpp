#include <catch2/catch_amalgamated.hpp>
#include <string>

#include "resfree/config.hpp"

using namespace resfree;
using Catch::Approx;

TEST_CASE("config parser: sections, scalars, arrays, comments") {
  const std::string text = R"(
# top-level keys live in the unnamed section
seed = 7          # trailing comment
threads = 4
sectors = [0, 1, 2]

[model]
s = 0.5
family = "power-decay"   # a "#" inside quotes is not a comment: "#"
kappa = 0.25
rho = 0.3

[grid]
r_min = 0.5
r_max = 30.0
n = 800

[virial]
E = -1.0
mu = "auto"
)";
  const ConfigFile cfg = ConfigFile::parse_string(text);
  CHECK(cfg.number("", "seed") == 7.0);
  CHECK(cfg.number("", "threads") == 4.0);
  CHECK(cfg.numbers_or("", "sectors", {}) ==
        std::vector<double>{0.0, 1.0, 2.0});
  CHECK(cfg.string("model", "family") == "power-decay");
  CHECK(cfg.number("model", "kappa") == Approx(0.25));
  CHECK_FALSE(cfg.number_or_auto("virial", "mu").has_value());
  CHECK(cfg.number_or_auto("virial", "E").value() == Approx(-1.0));
  CHECK(cfg.number_or("grid", "missing", 3.5) == 3.5);
  CHECK(cfg.string_or("weyl", "phase", "none") == "none");
  CHECK_THROWS_AS(cfg.number("model", "family"), ConfigError);
  CHECK_THROWS_AS(cfg.string("model", "s"), ConfigError);
  CHECK_THROWS_AS(cfg.number("nowhere", "nothing"), ConfigError);
}

TEST_CASE("config parser: malformed input") {
  CHECK_THROWS_AS(ConfigFile::parse_string("[model\ns = 1"), ConfigError);
  CHECK_THROWS_AS(ConfigFile::parse_string("just words"), ConfigError);
  CHECK_THROWS_AS(ConfigFile::parse_string("k ="), ConfigError);
  CHECK_THROWS_AS(ConfigFile::parse_string("k = 1x2"), ConfigError);
  CHECK_THROWS_AS(ConfigFile::parse_string("k = [1, 2"), ConfigError);
}

TEST_CASE("run config: defaults and echo round trip") {
  const std::string text = "[model]\ns = 0.5\n";
  const RunConfig rc = RunConfig::from_string(text);
  CHECK(rc.s == 0.5);
  CHECK(rc.d == 3);
  CHECK(rc.hbar == Approx(0.05));
  CHECK(rc.model.family == PotentialFamily::zero);
  CHECK(rc.beta == Approx(0.05));
  CHECK_FALSE(rc.R.has_value());
  CHECK_FALSE(rc.mu.has_value());
  CHECK(rc.n_re == 21);
  CHECK(rc.n_im == 11);
  CHECK(rc.weyl_lambda == std::vector<double>{-1.0, 0.0, 1.0});
  CHECK(rc.sectors == std::vector<double>{0.0});
  CHECK(rc.seed == 42);
  CHECK(rc.echo == text);
}

TEST_CASE("run config: explicit values override defaults") {
  const RunConfig rc = RunConfig::from_string(R"(
seed = 11
[model]
s = 1.0
d = 4
hbar = 0.1
family = "log-decay"
kappa = 0.2
rho = 0.2
[distortion]
beta = 0.08
R = 2.0
[virial]
E = -4.0
mu = 0.5
[scan]
re_min = -4.5
re_max = -3.5
im_min = -0.1
im_max = 0.0
n_re = 5
n_im = 3
[weyl]
lambda = [0.0, 1.0]
n_values = [3, 4]
phase = "none"
)");
  CHECK(rc.s == 1.0);
  CHECK(rc.d == 4);
  CHECK(rc.model.family == PotentialFamily::log_decay);
  CHECK(rc.model.s == 1.0);
  CHECK(rc.R.value() == Approx(2.0));
  CHECK(rc.mu.value() == Approx(0.5));
  CHECK(rc.re_min.value() == Approx(-4.5));
  CHECK(rc.n_re == 5);
  CHECK(rc.weyl_lambda == std::vector<double>{0.0, 1.0});
  CHECK(rc.seed == 11);
}

TEST_CASE("run config: validation rejects inconsistent setups") {
  const auto bad = [](const std::string& text) {
    CHECK_THROWS_AS(RunConfig::from_string(text), ConfigError);
  };
  bad("[model]\ns = 0.0\n");
  bad("[model]\ns = 1.5\n");
  bad("[model]\nd = 1\n");
  bad("[model]\nhbar = -0.1\n");
  bad("[model]\nfamily = \"power-decay\"\ns = 1.0\n");
  bad("[model]\nfamily = \"log-decay\"\ns = 0.5\n");
  bad("[model]\nrho = 1.5\n");
  bad("[distortion]\nbeta = 0.0\n");
  bad("[distortion]\nR = -1.0\n");
  bad("[grid]\nr_min = 0.0\n");
  bad("[grid]\nn = 8\n");
  bad("[scan]\nn_re = 0\n");
  // mu = auto needs the free construction, which assumes q = 0.
  bad("[model]\nfamily = \"power-decay\"\nkappa = 0.1\n[virial]\nmu = "
      "\"auto\"\n");
  bad("[virial]\nmu = -0.2\n");
  bad("[classical]\nx0 = [1, 0]\nxi0 = [1]\n");
  bad("[classical]\ndt = 0.0\n");
  bad("[weyl]\nphase = \"exact\"\n");
  bad("sectors = [0, 1.5]\n");
  bad("threads = -2\n");
}

TEST_CASE("run config: missing file") {
  CHECK_THROWS_AS(RunConfig::from_file("/nonexistent/path.toml"), ConfigError);
}
