#pragma once

// Run configuration: a small sectioned key=value format (INI-style).
// Sections [preset] [mesh] [sweep] [tolerances] [output] are optional; every
// key is also accepted at top level. '#' and ';' start comments. Unknown or
// duplicate keys are rejected; eps entries accept "1/8" or "0.125".

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rpwg/errors.hpp"
#include "rpwg/geometry.hpp"

namespace rpwg {

struct RunConfig {
  // [preset]
  double alpha = 1.0;
  double r = 1.0;
  double L = 1.0;
  bool unperturbed = false;  // control geometry: plain strip, no protuberances
  std::vector<double> eps_list;

  // [mesh]
  double target_h = 0.05;
  double grading = 1.2;

  // [sweep]
  int n_phi = 33;
  int k = 12;
  double lambda_max = 0;  // 0 = auto: 2*(pi/(2L))^2

  // [tolerances]
  double eig_tol = 1e-7;
  double root_tol = 1e-12;

  // [output]
  std::string directory = "out";
  std::vector<std::string> formats = {"csv", "json", "svg"};

  int threads = 1;  // CLI flag, not a config key

  double window_max() const {
    return lambda_max > 0 ? lambda_max : 2.0 * std::pow(std::numbers::pi / (2.0 * L), 2);
  }
};

namespace configdetail {

struct RawEntry {
  std::string value;
  int line = 0;
  int column = 0;
};

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

[[noreturn]] inline void parse_fail(int line, int column, const std::string& what) {
  std::ostringstream os;
  os << "line " << line << ", column " << column << ": " << what;
  throw Error(ErrorCode::PARSE_ERROR, os.str());
}

inline double parse_number(const std::string& v, int line, int col) {
  // accepts decimals and p/q rationals
  const auto slash = v.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const double x = std::stod(v, &used);
      if (used != v.size()) parse_fail(line, col, "malformed number '" + v + "'");
      return x;
    }
    const std::string num = trim(v.substr(0, slash)), den = trim(v.substr(slash + 1));
    const double p = std::stod(num, &used);
    if (used != num.size()) parse_fail(line, col, "malformed rational '" + v + "'");
    const double q = std::stod(den, &used);
    if (used != den.size() || q == 0) parse_fail(line, col, "malformed rational '" + v + "'");
    return p / q;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    parse_fail(line, col, "malformed number '" + v + "'");
  }
}

inline bool parse_bool(const std::string& v, int line, int col) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  parse_fail(line, col, "expected a boolean, got '" + v + "'");
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> items;
  std::string cur;
  for (char c : v) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c)) || c == '[' || c == ']') {
      if (!cur.empty()) items.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) items.push_back(cur);
  return items;
}

}  // namespace configdetail

/// Parses and validates a configuration document. Throws PARSE_ERROR (with
/// line/column) on syntax problems and duplicate keys, VALIDATION_ERROR
/// listing offending fields on unknown keys or parameter sets that fail
/// geometry validation.
inline RunConfig parse_config(std::string_view text) {
  using configdetail::parse_fail;

  static const std::set<std::string> sections{"preset", "mesh", "sweep", "tolerances", "output"};
  static const std::map<std::string, std::string> key_home{
      {"alpha", "preset"},   {"r", "preset"},          {"L", "preset"},
      {"unperturbed", "preset"}, {"eps_list", "preset"},
      {"target_h", "mesh"},  {"grading", "mesh"},
      {"n_phi", "sweep"},    {"k", "sweep"},           {"lambda_max", "sweep"},
      {"eig_tol", "tolerances"}, {"root_tol", "tolerances"},
      {"directory", "output"},   {"formats", "output"},
  };

  std::map<std::string, configdetail::RawEntry> entries;  // canonical key -> value
  std::vector<std::string> unknown;

  std::string section;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    const std::string t = configdetail::trim(line);
    if (t.empty()) continue;

    if (t.front() == '[') {
      if (t.back() != ']') parse_fail(line_no, 1, "unterminated section header");
      section = configdetail::trim(t.substr(1, t.size() - 2));
      if (!sections.count(section)) unknown.push_back("[" + section + "]");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) parse_fail(line_no, 1, "expected key = value");
    const std::string key = configdetail::trim(t.substr(0, eq));
    const std::string value = configdetail::trim(t.substr(eq + 1));
    if (key.empty()) parse_fail(line_no, 1, "empty key");

    const auto home = key_home.find(key);
    if (home == key_home.end()) {
      unknown.push_back(section.empty() ? key : section + "." + key);
      continue;
    }
    if (!section.empty() && home->second != section) {
      unknown.push_back(section + "." + key);
      continue;
    }
    if (entries.count(key))
      parse_fail(line_no, static_cast<int>(eq + 2), "duplicate key '" + key + "'");
    entries[key] = configdetail::RawEntry{value, line_no, static_cast<int>(eq + 2)};
  }

  if (!unknown.empty()) {
    std::ostringstream os;
    os << "unknown configuration fields:";
    for (const auto& k : unknown) os << ' ' << k;
    throw Error(ErrorCode::VALIDATION_ERROR, os.str());
  }

  RunConfig cfg;
  auto number = [&](const char* key, double& slot) {
    if (auto it = entries.find(key); it != entries.end())
      slot = configdetail::parse_number(it->second.value, it->second.line, it->second.column);
  };
  auto integer = [&](const char* key, int& slot) {
    if (auto it = entries.find(key); it != entries.end()) {
      const double x = configdetail::parse_number(it->second.value, it->second.line, it->second.column);
      if (x != std::floor(x)) parse_fail(it->second.line, it->second.column, "expected an integer");
      slot = static_cast<int>(x);
    }
  };
  number("alpha", cfg.alpha);
  number("r", cfg.r);
  number("L", cfg.L);
  number("target_h", cfg.target_h);
  number("grading", cfg.grading);
  number("lambda_max", cfg.lambda_max);
  number("eig_tol", cfg.eig_tol);
  number("root_tol", cfg.root_tol);
  integer("n_phi", cfg.n_phi);
  integer("k", cfg.k);
  if (auto it = entries.find("unperturbed"); it != entries.end())
    cfg.unperturbed = configdetail::parse_bool(it->second.value, it->second.line, it->second.column);
  if (auto it = entries.find("directory"); it != entries.end()) cfg.directory = it->second.value;
  if (auto it = entries.find("formats"); it != entries.end()) {
    cfg.formats = configdetail::split_list(it->second.value);
    for (const auto& f : cfg.formats)
      if (f != "csv" && f != "json" && f != "svg")
        throw Error(ErrorCode::VALIDATION_ERROR, "unknown output format '" + f + "'");
  }
  if (auto it = entries.find("eps_list"); it != entries.end()) {
    for (const auto& item : configdetail::split_list(it->second.value))
      cfg.eps_list.push_back(configdetail::parse_number(item, it->second.line, it->second.column));
  }

  // Field validation; collect everything wrong, then report.
  std::vector<std::string> bad;
  if (!(cfg.alpha > 0)) bad.push_back("alpha must be positive");
  if (!(cfg.r > 0)) bad.push_back("r must be positive");
  if (!(cfg.L > 0)) bad.push_back("L must be positive");
  if (!(cfg.target_h > 0)) bad.push_back("target_h must be positive");
  if (!(cfg.grading >= 1)) bad.push_back("grading must be >= 1");
  if (cfg.n_phi < 2) bad.push_back("n_phi must be >= 2");
  if (cfg.k < 1) bad.push_back("k must be >= 1");
  if (cfg.lambda_max < 0) bad.push_back("lambda_max must be positive (or omitted for auto)");
  if (!(cfg.eig_tol > 0)) bad.push_back("eig_tol must be positive");
  if (!(cfg.root_tol > 0)) bad.push_back("root_tol must be positive");
  for (std::size_t i = 1; i < cfg.eps_list.size(); ++i)
    if (!(cfg.eps_list[i] < cfg.eps_list[i - 1])) {
      bad.push_back("eps_list must be strictly decreasing");
      break;
    }
  for (double eps : cfg.eps_list) {
    if (!detail::reciprocal_integer(eps)) {
      std::ostringstream os;
      os << "eps_list entry " << eps << " is not the reciprocal of a positive integer";
      bad.push_back(os.str());
      continue;
    }
    try {
      if (cfg.unperturbed)
        validate_params(WaveguideParams::strip(eps, cfg.L));
      else
        asymptotic_preset(ScalingPreset{cfg.alpha, cfg.r, cfg.L}, eps);
    } catch (const Error& e) {
      bad.push_back(e.what());
    }
  }
  if (!bad.empty()) {
    std::ostringstream os;
    os << "invalid configuration:";
    for (const auto& b : bad) os << "\n  - " << b;
    throw Error(ErrorCode::VALIDATION_ERROR, os.str());
  }
  return cfg;
}

}  // namespace rpwg
