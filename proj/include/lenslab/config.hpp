#pragma once

// Flat key = value experiment configuration.
//
//   # comment
//   experiment = fixed-points
//   system     = rot:k=4,s=1
//   backend    = rational
//   output_dir = results
//   seed       = 7
//
// Reserved keys fill the named fields; every other key is an experiment
// parameter. `--set key=value` overrides use the same syntax.

#include <fstream>
#include <istream>
#include <map>
#include <string>
#include <string_view>

#include "lenslab/errors.hpp"

namespace lenslab {

struct ExperimentConfig {
  std::string experiment;
  std::string system;
  std::string backend = "rational";
  std::string output_dir = "results";
  std::map<std::string, std::string> params;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

inline void assign(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "experiment")
    cfg.experiment = value;
  else if (key == "system")
    cfg.system = value;
  else if (key == "backend")
    cfg.backend = value;
  else if (key == "output_dir")
    cfg.output_dir = value;
  else
    cfg.params[key] = value;
}

inline std::pair<std::string, std::string> split_assignment(std::string_view text, const std::string& where) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos)
    throw InvalidConfig(where + ": expected key = value, got '" + std::string(text) + "'");
  std::string key = trim(text.substr(0, eq));
  std::string value = trim(text.substr(eq + 1));
  if (key.empty()) throw InvalidConfig(where + ": empty key");
  return {std::move(key), std::move(value)};
}

}  // namespace detail

inline ExperimentConfig parse_config(std::istream& in, const std::string& source = "config") {
  ExperimentConfig cfg;
  std::map<std::string, int> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = source + ":" + std::to_string(lineno);
    std::string body = detail::trim(line);
    if (body.empty() || body[0] == '#' || body[0] == ';') continue;
    if (body[0] == '[') throw InvalidConfig(where + ": sections are not supported, the config is flat");
    auto [key, value] = detail::split_assignment(body, where);
    if (seen.count(key))
      throw InvalidConfig(where + ": key '" + key + "' already set on line " + std::to_string(seen[key]));
    seen[key] = lineno;
    detail::assign(cfg, key, value);
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

inline void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
  auto [key, value] = detail::split_assignment(assignment, "--set");
  detail::assign(cfg, key, value);
}

}  // namespace lenslab
