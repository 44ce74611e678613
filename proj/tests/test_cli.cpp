#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RESFREE_CLI_PATH) + " " + args +
                          " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("resfree_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path path = dir / "run.toml";
  std::ofstream out(path);
  out << text;
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::vector<double>> read_csv(const fs::path& path,
                                          std::string* header = nullptr) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  REQUIRE(std::getline(in, line));
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

const char* kCertifyGood = R"(
[model]
s = 0.5
hbar = 0.1
[distortion]
beta = 0.05
[grid]
r_min = 0.5
r_max = 30.0
n = 300
[virial]
E = -1.0
[scan]
n_re = 5
n_im = 3
)";

}  // namespace

TEST_CASE("cli: distort writes the map table and is local below R") {
  const fs::path dir = fresh_dir("distort");
  const fs::path cfg = write_config(dir, R"(
[model]
s = 0.5
[distortion]
beta = 0.1
R = 2.0
[grid]
r_min = 0.5
r_max = 10.0
n = 96
)");
  REQUIRE(run_cli("distort --config " + cfg.string() + " --out " +
                  (dir / "out").string()) == 0);
  std::string header;
  const auto rows = read_csv(dir / "out" / "distortion.csv", &header);
  CHECK(header ==
        "r,rtheta_re,rtheta_im,drtheta_re,drtheta_im,d2rtheta_re,"
        "d2rtheta_im,jacobian_re,jacobian_im,phi_re,phi_im");
  REQUIRE(rows.size() == 96);
  for (const auto& row : rows) {
    REQUIRE(row.size() == 11);
    // chi_R(r) = chi1(r/2) = 0 below r = 2: the map is the identity there.
    if (row[0] <= 2.0) {
      CHECK(std::abs(row[1] - row[0]) <= 1e-13 * row[0]);
      CHECK(std::abs(row[2]) <= 1e-14);
      CHECK(std::abs(row[7] - 1.0) <= 1e-12);  // jacobian_re
      CHECK(std::abs(row[8]) <= 1e-12);
    }
  }
  // Far out the map is genuinely complex.
  CHECK(rows.back()[2] > 0.0);
  CHECK(slurp(dir / "out" / "distortion_summary.json").find("\"L_s\"") !=
        std::string::npos);
}

TEST_CASE("cli: scan emits n_re * n_im rows and is run-to-run identical") {
  const fs::path dir = fresh_dir("scan");
  const fs::path cfg = write_config(dir, kCertifyGood);
  REQUIRE(run_cli("scan --config " + cfg.string() + " --out " +
                  (dir / "a").string()) == 0);
  REQUIRE(run_cli("scan --config " + cfg.string() + " --out " +
                  (dir / "b").string() + " --threads 3") == 0);
  std::string header;
  const auto rows = read_csv(dir / "a" / "scan.csv", &header);
  CHECK(header == "re_z,im_z,sigma_min");
  CHECK(rows.size() == 15);  // 5 * 3
  for (const auto& row : rows) CHECK(row[2] > 0.0);
  // Bitwise reproducibility, including across thread counts.
  CHECK(slurp(dir / "a" / "scan.csv") == slurp(dir / "b" / "scan.csv"));
}

TEST_CASE("cli: certify exit codes") {
  const fs::path dir = fresh_dir("certify");
  const fs::path good = write_config(dir, kCertifyGood);
  CHECK(run_cli("certify --config " + good.string() + " --out " +
                (dir / "pass").string()) == 0);
  const std::string cert = slurp(dir / "pass" / "certificate.json");
  CHECK(cert.find("\"pass\": true") != std::string::npos);

  // s = 1 near threshold: the window exists but condition (i) fails.
  const fs::path failing = dir / "fail.toml";
  std::ofstream(failing) << R"(
[model]
s = 1.0
hbar = 0.1
[distortion]
beta = 0.05
[grid]
r_min = 0.5
r_max = 30.0
n = 300
[virial]
E = -1.0
[scan]
n_re = 3
n_im = 3
)";
  CHECK(run_cli("certify --config " + failing.string() + " --out " +
                (dir / "fail").string()) == 2);

  // Invalid configuration -> 3; missing file -> 3.
  const fs::path invalid = dir / "invalid.toml";
  std::ofstream(invalid) << "[model]\ns = 1.5\n";
  CHECK(run_cli("certify --config " + invalid.string()) == 3);
  CHECK(run_cli("certify --config " + (dir / "nope.toml").string()) == 3);
}

TEST_CASE("cli: certify flags essential-line proximity") {
  const fs::path dir = fresh_dir("essline");
  // ess line at -(1-s) beta = -0.05; force the rectangle onto it.
  const fs::path cfg = write_config(dir, R"(
[model]
s = 0.5
hbar = 0.1
[distortion]
beta = 0.1
[grid]
r_min = 0.5
r_max = 30.0
n = 300
[virial]
E = -1.0
[scan]
im_min = -0.08
im_max = -0.02
n_re = 3
n_im = 3
)");
  CHECK(run_cli("certify --config " + cfg.string() + " --out " +
                (dir / "out").string()) == 2);
  const std::string cert = slurp(dir / "out" / "certificate.json");
  CHECK(cert.find("essential-line proximity") != std::string::npos);
  CHECK(cert.find("\"pass\": false") != std::string::npos);
}

TEST_CASE("cli: weyl residual table decreases along the sequence") {
  const fs::path dir = fresh_dir("weyl");
  const fs::path cfg = write_config(dir, R"(
[model]
s = 0.5
hbar = 0.1
[distortion]
beta = 0.1
R = 1.0
[weyl]
lambda = [0.0]
n_values = [3, 4, 5]
)");
  REQUIRE(run_cli("weyl --config " + cfg.string() + " --out " +
                  (dir / "out").string()) == 0);
  std::string header;
  const auto rows = read_csv(dir / "out" / "weyl.csv", &header);
  CHECK(header == "lambda,n,residual");
  REQUIRE(rows.size() == 3);
  CHECK(rows[0][2] > rows[1][2]);
  CHECK(rows[1][2] > rows[2][2]);
}

TEST_CASE("cli: classical trajectory table") {
  const fs::path dir = fresh_dir("classical");
  const fs::path cfg = write_config(dir, R"(
[model]
s = 0.5
[classical]
x0 = [2.0, 0.0, 0.0]
xi0 = [0.5, 0.3, 0.0]
t_max = 1.0
dt = 0.01
)");
  REQUIRE(run_cli("classical --config " + cfg.string() + " --out " +
                  (dir / "out").string()) == 0);
  std::string header;
  const auto rows = read_csv(dir / "out" / "trajectory.csv", &header);
  CHECK(header == "t,r,g,h");
  CHECK(rows.size() == 101);
  // Energy column is conserved.
  for (const auto& row : rows)
    CHECK(std::abs(row[3] - rows[0][3]) < 1e-8);
}

TEST_CASE("cli: virial subcommand and thread env override") {
  const fs::path dir = fresh_dir("virial");
  const fs::path cfg = write_config(dir, kCertifyGood);
  CHECK(run_cli("virial --config " + cfg.string() + " --out " +
                (dir / "out").string()) == 0);
  CHECK(slurp(dir / "out" / "virial.json").find("\"pass\": true") !=
        std::string::npos);

  const std::string env_cmd = "RESFREE_THREADS=2 " +
                              std::string(RESFREE_CLI_PATH) +
                              " scan --config " + cfg.string() + " --out " +
                              (dir / "env").string() + " > /dev/null 2>&1";
  CHECK(WEXITSTATUS(std::system(env_cmd.c_str())) == 0);
  CHECK(fs::exists(dir / "env" / "scan.csv"));
}
