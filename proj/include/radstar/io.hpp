#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "radstar/diagnostics.hpp"
#include "radstar/errors.hpp"
#include "radstar/evolver.hpp"
#include "radstar/steady_star.hpp"

namespace radstar {

/// Malformed configuration input; carries the 1-based offending line number.
struct ConfigError : std::invalid_argument {
  int line;
  ConfigError(const std::string& msg, int line_)
      : std::invalid_argument(msg + " (line " + std::to_string(line_) + ")"),
        line(line_) {}
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// 17-significant-digit decimal: round-trips every double and is stable
/// across writes, so CSV write -> read -> write is byte-identical.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Comma-separated table with one header row and LF line endings.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

inline void write_csv(const CsvTable& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_csv: cannot open " + path);
  for (std::size_t c = 0; c < t.columns.size(); ++c)
    out << (c ? "," : "") << t.columns[c];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      out << (c ? "," : "") << format_double(row[c]);
    out << '\n';
  }
}

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_csv: cannot open " + path);
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw IoError("read_csv: empty file " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) t.columns.push_back(cell);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != t.columns.size())
      throw IoError("read_csv: ragged row in " + path);
    t.rows.push_back(std::move(row));
  }
  return t;
}

/// Flat key=value configuration with '#' comments and blank lines. Throws
/// ConfigError with the offending line number on anything else.
inline std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  const auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("expected key=value, got '" + body + "'", lineno);
    const std::string key = trim(body.substr(0, eq));
    const std::string val = trim(body.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("empty key or value in '" + body + "'", lineno);
    kv[key] = val;
  }
  return kv;
}

inline std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("parse_config_file: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

/// Run provenance record. Deliberately timestamp-free so a re-run from the
/// same inputs writes an identical file.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::string version = "radstar 1.0.0";
  std::map<std::string, std::string> summary;
  std::vector<std::string> outputs;
  std::string status = "ok";
};

inline void write_manifest(const RunManifest& m, const std::string& path) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["version"] = m.version;
  j["config"] = std::map<std::string, std::string>(m.config);  // sorted keys
  j["summary"] = std::map<std::string, std::string>(m.summary);
  j["outputs"] = m.outputs;
  j["status"] = m.status;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_manifest: cannot open " + path);
  out << j.dump(2) << '\n';
}

inline CsvTable profile_table(const SteadyProfile& prof) {
  CsvTable t;
  t.columns = {"r", "u", "rho", "theta", "psi"};
  t.rows.reserve(prof.r_grid.size());
  for (std::size_t j = 0; j < prof.r_grid.size(); ++j)
    t.rows.push_back({prof.r_grid[j], prof.u[j], prof.rho[j], prof.theta[j],
                      prof.psi[j]});
  return t;
}

inline void write_profile_header(const SteadyProfile& prof, const std::string& path) {
  nlohmann::ordered_json j;
  j["K"] = prof.params.K;
  j["epsilon"] = prof.params.epsilon;
  j["S"] = prof.exponents.S;
  j["gamma_eps"] = prof.exponents.gamma_eps;
  j["alpha_eps"] = prof.exponents.alpha_eps;
  j["K_bar"] = prof.exponents.K_bar;
  j["R"] = prof.R;
  j["mass_tilde"] = prof.mass_tilde;
  j["M"] = prof.total_mass_4pi();
  j["rho_c"] = prof.rho_c;
  j["theta_c"] = prof.theta_c;
  j["theta_slope_at_R"] = prof.theta_slope_at_R;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_profile_header: cannot open " + path);
  out << j.dump(2) << '\n';
}

/// Snapshot CSV: face rows carry (x_face, r, v), cell rows (x_cell, rho0,
/// Theta); the two blocks are interleaved by a kind column (0 face, 1 cell).
inline CsvTable snapshot_table(const LagrangianState& s, const LagrangianGrid& g) {
  CsvTable t;
  t.columns = {"kind", "x", "col_a", "col_b"};
  for (std::size_t j = 0; j <= g.N; ++j)
    t.rows.push_back({0.0, g.x_face[j], s.r_face[j], s.v_face[j]});
  for (std::size_t i = 0; i < g.N; ++i)
    t.rows.push_back({1.0, g.x_cell[i], g.rho0_cell[i], s.Theta_cell[i]});
  return t;
}

inline CsvTable diagnostics_table(const std::vector<DiagnosticsReport>& reports) {
  CsvTable t;
  t.columns = {"t",
               "e1_total",
               "e1_time_integral",
               "lambda0",
               "m0",
               "m0_alert",
               "vacuum_min_negslope",
               "vacuum_min_theta_over_sigma",
               "center_theta_slope",
               "energy_ledger_residual"};
  for (const auto& r : reports)
    t.rows.push_back({r.t, r.e1.total(), r.e1_time_integral, r.lambda0, r.m0,
                      r.m0_alert ? 1.0 : 0.0, r.vacuum_min_negslope,
                      r.vacuum_min_theta_over_sigma, r.center_theta_slope,
                      r.energy_ledger_residual});
  return t;
}

}  // namespace radstar
