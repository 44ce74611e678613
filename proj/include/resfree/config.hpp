#pragma once

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "resfree/potential.hpp"

namespace resfree {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Minimal TOML-subset reader: [sections], key = value with numbers,
/// "strings", booleans and flat arrays. All the run configs need.
class ConfigFile {
 public:
  struct Value {
    enum class Kind { number, string, boolean, numbers, strings } kind;
    double num = 0.0;
    std::string str;
    bool flag = false;
    std::vector<double> nums;
    std::vector<std::string> strs;
  };

  static ConfigFile parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
  }

  static ConfigFile parse_string(const std::string& text) {
    ConfigFile cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const size_t hash = find_comment(line);
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw ConfigError("config line " + std::to_string(lineno) +
                            ": malformed section header");
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      const size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": expected key = value");
      const std::string key = trim(line.substr(0, eq));
      const std::string raw = trim(line.substr(eq + 1));
      if (key.empty() || raw.empty())
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": empty key or value");
      cfg.values_[section + "." + key] = parse_value(raw, lineno);
    }
    return cfg;
  }

  bool has(const std::string& section, const std::string& key) const {
    return values_.count(section + "." + key) > 0;
  }

  double number(const std::string& section, const std::string& key) const {
    const Value& v = get(section, key);
    if (v.kind != Value::Kind::number)
      throw ConfigError("config: " + section + "." + key +
                        " must be a number");
    return v.num;
  }

  double number_or(const std::string& section, const std::string& key,
                   double fallback) const {
    return has(section, key) ? number(section, key) : fallback;
  }

  std::string string(const std::string& section,
                     const std::string& key) const {
    const Value& v = get(section, key);
    if (v.kind != Value::Kind::string)
      throw ConfigError("config: " + section + "." + key +
                        " must be a string");
    return v.str;
  }

  std::string string_or(const std::string& section, const std::string& key,
                        const std::string& fallback) const {
    return has(section, key) ? string(section, key) : fallback;
  }

  /// Number, or the literal string "auto" -> empty optional.
  std::optional<double> number_or_auto(const std::string& section,
                                       const std::string& key) const {
    if (!has(section, key)) return std::nullopt;
    const Value& v = get(section, key);
    if (v.kind == Value::Kind::string && v.str == "auto") return std::nullopt;
    if (v.kind == Value::Kind::number) return v.num;
    throw ConfigError("config: " + section + "." + key +
                      " must be a number or \"auto\"");
  }

  std::vector<double> numbers_or(const std::string& section,
                                 const std::string& key,
                                 std::vector<double> fallback) const {
    if (!has(section, key)) return fallback;
    const Value& v = get(section, key);
    if (v.kind == Value::Kind::number) return {v.num};
    if (v.kind != Value::Kind::numbers)
      throw ConfigError("config: " + section + "." + key +
                        " must be a number array");
    return v.nums;
  }

 private:
  static size_t find_comment(const std::string& line) {
    bool in_string = false;
    for (size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_string = !in_string;
      if (line[i] == '#' && !in_string) return i;
    }
    return std::string::npos;
  }

  static std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
  }

  static Value parse_scalar(const std::string& raw, int lineno) {
    Value v;
    if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') {
      v.kind = Value::Kind::string;
      v.str = raw.substr(1, raw.size() - 2);
      return v;
    }
    if (raw == "true" || raw == "false") {
      v.kind = Value::Kind::boolean;
      v.flag = raw == "true";
      return v;
    }
    try {
      size_t used = 0;
      v.num = std::stod(raw, &used);
      if (used != raw.size()) throw std::invalid_argument(raw);
    } catch (const std::exception&) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": cannot parse value '" + raw + "'");
    }
    v.kind = Value::Kind::number;
    return v;
  }

  static Value parse_value(const std::string& raw, int lineno) {
    if (raw.front() != '[') return parse_scalar(raw, lineno);
    if (raw.back() != ']')
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": unterminated array");
    Value v;
    v.kind = Value::Kind::numbers;
    std::string inner = raw.substr(1, raw.size() - 2);
    std::istringstream items(inner);
    std::string item;
    while (std::getline(items, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      const Value elem = parse_scalar(item, lineno);
      if (elem.kind == Value::Kind::string) {
        v.kind = Value::Kind::strings;
        v.strs.push_back(elem.str);
      } else {
        v.nums.push_back(elem.num);
      }
    }
    return v;
  }

  const Value& get(const std::string& section, const std::string& key) const {
    const auto it = values_.find(section + "." + key);
    if (it == values_.end())
      throw ConfigError("config: missing required key " + section + "." +
                        key);
    return it->second;
  }

  std::map<std::string, Value> values_;
};

/// Everything a run needs, validated up front.
struct RunConfig {
  // model
  double s = 0.5;
  int d = 3;
  double hbar = 0.05;
  PotentialModel model;
  // distortion
  double beta = 0.05;
  std::optional<double> R;  // empty -> from the virial window
  // grid
  double r_min = 0.5, r_max = 30.0;
  int n = 800;
  // virial
  double E = -1.0;
  std::optional<double> mu;  // empty -> section-3 default
  // scan (empty optionals -> default rectangle around E - i beta mu)
  std::optional<double> re_min, re_max, im_min, im_max;
  int n_re = 21, n_im = 11;
  // weyl
  std::vector<double> weyl_lambda{-1.0, 0.0, 1.0};
  std::vector<double> weyl_n{3, 4, 5, 6, 7};
  std::string weyl_phase = "none";
  // classical
  std::vector<double> x0{3.0, 0.0, 0.0};
  std::vector<double> xi0{1.0, 0.0, 0.0};
  double t_max = 5.0, dt = 1e-3;
  // misc
  std::vector<double> sectors{0};
  long seed = 42;
  int threads = 1;

  std::string echo;  // verbatim config text for reproduction

  static RunConfig from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    RunConfig rc = from_string(buf.str());
    return rc;
  }

  static RunConfig from_string(const std::string& text) {
    const ConfigFile cfg = ConfigFile::parse_string(text);
    RunConfig rc;
    rc.echo = text;

    rc.s = cfg.number_or("model", "s", rc.s);
    rc.d = int(cfg.number_or("model", "d", rc.d));
    rc.hbar = cfg.number_or("model", "hbar", rc.hbar);
    rc.model.family = potential_family_from_string(
        cfg.string_or("model", "family", "zero"));
    rc.model.kappa = cfg.number_or("model", "kappa", 0.0);
    rc.model.rho = cfg.number_or("model", "rho", 0.3);
    rc.model.beta0 = cfg.number_or("model", "beta0", 0.5);
    rc.model.s = rc.s;

    rc.beta = cfg.number_or("distortion", "beta", rc.beta);
    rc.R = cfg.number_or_auto("distortion", "R");

    rc.r_min = cfg.number_or("grid", "r_min", rc.r_min);
    rc.r_max = cfg.number_or("grid", "r_max", rc.r_max);
    rc.n = int(cfg.number_or("grid", "n", rc.n));

    rc.E = cfg.number_or("virial", "E", rc.E);
    rc.mu = cfg.number_or_auto("virial", "mu");

    rc.re_min = cfg.number_or_auto("scan", "re_min");
    rc.re_max = cfg.number_or_auto("scan", "re_max");
    rc.im_min = cfg.number_or_auto("scan", "im_min");
    rc.im_max = cfg.number_or_auto("scan", "im_max");
    rc.n_re = int(cfg.number_or("scan", "n_re", rc.n_re));
    rc.n_im = int(cfg.number_or("scan", "n_im", rc.n_im));

    rc.weyl_lambda = cfg.numbers_or("weyl", "lambda", rc.weyl_lambda);
    rc.weyl_n = cfg.numbers_or("weyl", "n_values", rc.weyl_n);
    rc.weyl_phase = cfg.string_or("weyl", "phase", rc.weyl_phase);

    rc.x0 = cfg.numbers_or("classical", "x0", rc.x0);
    rc.xi0 = cfg.numbers_or("classical", "xi0", rc.xi0);
    rc.t_max = cfg.number_or("classical", "t_max", rc.t_max);
    rc.dt = cfg.number_or("classical", "dt", rc.dt);

    rc.sectors = cfg.numbers_or("", "sectors", rc.sectors);
    rc.seed = long(cfg.number_or("", "seed", double(rc.seed)));
    rc.threads = int(cfg.number_or("", "threads", rc.threads));

    rc.validate();
    return rc;
  }

  void validate() const {
    if (!(s > 0.0 && s <= 1.0))
      throw ConfigError("model.s must lie in (0, 1]");
    if (d < 2) throw ConfigError("model.d must be >= 2");
    if (!(hbar > 0.0)) throw ConfigError("model.hbar must be > 0");
    if (!(model.rho > 0.0 && model.rho < 1.0))
      throw ConfigError("model.rho must lie in (0, 1)");
    if (!(model.beta0 > 0.0)) throw ConfigError("model.beta0 must be > 0");
    if (model.family == PotentialFamily::power_decay && s >= 1.0)
      throw ConfigError("power-decay family requires s < 1");
    if (model.family == PotentialFamily::log_decay && s < 1.0)
      throw ConfigError("log-decay family requires s = 1");
    if (!(beta > 0.0)) throw ConfigError("distortion.beta must be > 0");
    if (R && !(*R > 0.0)) throw ConfigError("distortion.R must be > 0");
    if (!(r_min > 0.0) || !(r_max > r_min))
      throw ConfigError("grid range must satisfy 0 < r_min < r_max");
    if (n < 16) throw ConfigError("grid.n must be >= 16");
    if (n_re < 1 || n_im < 1) throw ConfigError("scan counts must be >= 1");
    if (!mu && model.family != PotentialFamily::zero)
      throw ConfigError("virial.mu = \"auto\" needs the zero family");
    if (mu && !(*mu > 0.0)) throw ConfigError("virial.mu must be > 0");
    if (x0.size() != xi0.size() || x0.empty())
      throw ConfigError("classical.x0 and xi0 need equal nonzero lengths");
    if (!(dt > 0.0) || !(t_max > 0.0))
      throw ConfigError("classical.dt and t_max must be > 0");
    if (weyl_phase != "none" && weyl_phase != "integral")
      throw ConfigError("weyl.phase must be \"none\" or \"integral\"");
    for (double ell : sectors)
      if (ell < 0.0 || ell != std::floor(ell))
        throw ConfigError("sectors must be nonnegative integers");
    if (threads < 0) throw ConfigError("threads must be >= 0");
  }
};

}  // namespace resfree
