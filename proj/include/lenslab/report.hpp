#pragma once

// Experiment reports. The report JSON is a pure function of (config, seed,
// backend); wall-clock time goes to a separate timing file.
//
//   <dir>/<experiment>.report.json
//   <dir>/<experiment>.<series>.csv
//   <dir>/<experiment>.timing.json

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lenslab/errors.hpp"

namespace lenslab {

struct SeriesTable {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;

  void add(std::vector<nlohmann::json> row) {
    if (row.size() != columns.size())
      throw DimensionMismatch("series row", columns.size(), row.size());
    rows.push_back(std::move(row));
  }
};

struct Verdict {
  std::string name;
  bool pass = false;
  nlohmann::json observed;  // worst observed value, or a count of failures
  std::string tolerance;    // the declared criterion
};

struct ExperimentReport {
  std::string experiment;
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json scalars = nlohmann::json::object();
  std::map<std::string, SeriesTable> series;
  std::vector<Verdict> verdicts;
  double wall_seconds = 0.0;

  bool passed() const {
    for (const auto& v : verdicts)
      if (!v.pass) return false;
    return true;
  }

  SeriesTable& table(const std::string& name, std::vector<std::string> columns) {
    auto& t = series[name];
    t.columns = std::move(columns);
    t.rows.clear();
    return t;
  }

  void verdict(std::string name, bool pass, nlohmann::json observed, std::string tolerance) {
    verdicts.push_back({std::move(name), pass, std::move(observed), std::move(tolerance)});
  }

  nlohmann::json to_json() const {
    nlohmann::json s = nlohmann::json::object();
    for (const auto& [name, t] : series) s[name] = {{"columns", t.columns}, {"rows", t.rows}};
    nlohmann::json v = nlohmann::json::array();
    for (const auto& x : verdicts)
      v.push_back({{"name", x.name}, {"pass", x.pass}, {"observed", x.observed}, {"tolerance", x.tolerance}});
    return {{"experiment", experiment}, {"config", config}, {"scalars", scalars},
            {"series", s}, {"verdicts", v}, {"pass", passed()}};
  }
};

namespace detail {

inline std::string csv_cell(const nlohmann::json& x) {
  std::string s;
  if (x.is_string())
    s = x.get<std::string>();
  else if (x.is_null())
    s = "";
  else
    s = x.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

}  // namespace detail

inline std::string table_csv(const SeriesTable& t) {
  std::ostringstream os;
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << detail::csv_cell(row[c]);
    os << '\n';
  }
  return os.str();
}

inline std::string report_text(const ExperimentReport& r) { return r.to_json().dump(2) + "\n"; }

// Returns the paths written, report first.
inline std::vector<std::filesystem::path> write_report_files(const ExperimentReport& r,
                                                             const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InvalidConfig("cannot create output directory '" + dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw InvalidConfig("cannot write '" + p.string() + "'");
    out << text;
    written.push_back(p);
  };
  put(dir / (r.experiment + ".report.json"), report_text(r));
  for (const auto& [name, t] : r.series) put(dir / (r.experiment + "." + name + ".csv"), table_csv(t));
  nlohmann::json timing = {{"experiment", r.experiment}, {"wall_seconds", r.wall_seconds}};
  put(dir / (r.experiment + ".timing.json"), timing.dump(2) + "\n");
  return written;
}

}  // namespace lenslab
