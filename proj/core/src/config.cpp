#include "rg/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace rg {
namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

using FieldMap = std::map<std::string, double ReflexConfig::*>;

const FieldMap& fields() {
  static const FieldMap m = {
      {"d_thresh_out", &ReflexConfig::d_thresh_out},
      {"d_thresh_forward", &ReflexConfig::d_thresh_forward},
      {"d_thresh_in", &ReflexConfig::d_thresh_in},
      {"d_des_in", &ReflexConfig::d_des_in},
      {"k_out", &ReflexConfig::k_out},
      {"k_forward", &ReflexConfig::k_forward},
      {"k_in", &ReflexConfig::k_in},
      {"d_near", &ReflexConfig::d_near},
      {"d_far", &ReflexConfig::d_far},
      {"d_occlude", &ReflexConfig::d_occlude},
      {"theta_close", &ReflexConfig::theta_close},
      {"gamma_a", &ReflexConfig::gamma_a},
      {"r_power", &ReflexConfig::r_power},
      {"gamma_v", &ReflexConfig::gamma_v},
      {"gamma_f", &ReflexConfig::gamma_f},
      {"t_fail", &ReflexConfig::t_fail},
      {"clearance_baseline", &ReflexConfig::clearance_baseline},
  };
  return m;
}

} // namespace

void ReflexConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("invalid config: " + what); };
  auto positive = [&](double v, const char* name) {
    if (!(v > 0.0)) fail(std::string(name) + " must be > 0");
  };
  positive(d_thresh_out, "d_thresh_out");
  positive(d_thresh_forward, "d_thresh_forward");
  positive(d_thresh_in, "d_thresh_in");
  positive(d_des_in, "d_des_in");
  if (!(d_des_in < d_thresh_in)) fail("d_des_in must be < d_thresh_in");
  positive(k_out, "k_out");
  positive(k_forward, "k_forward");
  positive(k_in, "k_in");
  positive(d_near, "d_near");
  positive(d_far, "d_far");
  if (!(d_near <= d_far)) fail("d_near must be <= d_far");
  positive(d_occlude, "d_occlude");
  if (!(gamma_a > 0.0 && gamma_a < M_PI)) fail("gamma_a must be in (0, pi)");
  positive(r_power, "r_power");
  positive(gamma_v, "gamma_v");
  positive(gamma_f, "gamma_f");
  positive(t_fail, "t_fail");
  if (!(clearance_baseline >= 0.0)) fail("clearance_baseline must be >= 0");
}

ReflexConfig parse_config(const std::string& text, const std::string& origin) {
  ReflexConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line.substr(0, line.find('#')));
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected 'key = value', got '" + stripped + "'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    const auto it = fields().find(key);
    if (it == fields().end()) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    double parsed = 0.0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(first, last, parsed);
    if (ec != std::errc{} || ptr != last) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": bad number '" + value +
                        "' for key '" + key + "'");
    }
    cfg.*(it->second) = parsed;
  }
  cfg.validate();
  return cfg;
}

ReflexConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::string save_config(const ReflexConfig& cfg) {
  std::string out;
  char buf[64];
  for (const auto& [name, member] : fields()) {
    std::snprintf(buf, sizeof buf, "%.17g", cfg.*member);
    out += name;
    out += " = ";
    out += buf;
    out += '\n';
  }
  return out;
}

} // namespace rg
