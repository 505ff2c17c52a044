#pragma once

// Study outputs: CSV error table, JSON summary and a gnuplot script.
// All three are byte-identical for identical inputs.

#include "dgtime/harness/study.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace dgtime::harness {

namespace detail {

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

/// RFC 4180 field quoting.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  os << content;
}

}  // namespace detail

/// Columns: level, tau, h, err_<col>..., rate_<col>... with rate_ the pairwise
/// observed order from the previous level (empty on the first row or at the floor).
inline std::string to_csv(const StudyResult& res) {
  std::ostringstream os;
  std::vector<std::string> header{"level", "tau", "h"};
  for (const auto& c : res.table.columns) header.push_back("err_" + c);
  for (const auto& c : res.table.columns) header.push_back("rate_" + c);
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << detail::csv_field(header[i]);
  os << "\r\n";
  for (std::size_t r = 0; r < res.table.rows.size(); ++r) {
    const auto& row = res.table.rows[r];
    os << row.level << "," << detail::fmt_double(row.tau) << "," << (row.h > 0 ? detail::fmt_double(row.h) : "");
    for (double e : row.errors) os << "," << detail::fmt_double(e);
    for (const auto& rate : res.rates) {
      os << ",";
      if (r > 0 && rate.pairwise[r - 1]) os << detail::fmt_double(*rate.pairwise[r - 1]);
    }
    os << "\r\n";
  }
  return os.str();
}

inline nlohmann::json to_json(const StudyResult& res) {
  using nlohmann::json;
  const auto& cfg = res.config;
  json j;
  j["study"] = res.study;
  j["problem"] = cfg.problem;
  j["q"] = cfg.q;
  if (res.study != "time") {
    j["k"] = cfg.k;
    j["reference"] = cfg.reference == FemReference::exact ? "exact" : "semidiscrete";
    if (res.study == "fem-space") j["fixed_slabs"] = cfg.fixed_slabs;
    if (res.study == "fem-time") j["fixed_mesh"] = cfg.fixed_mesh;
  }
  j["ladder"] = cfg.ladder;
  j["final_time"] = cfg.final_time;
  j["grading"] = cfg.grading;
  j["margin"] = cfg.margin;
  j["seed"] = cfg.seed;
  j["columns"] = res.table.columns;
  json levels = json::array();
  for (const auto& row : res.table.rows) {
    json l;
    l["level"] = row.level;
    l["param"] = row.param;
    l["tau"] = row.tau;
    if (row.h > 0) l["h"] = row.h;
    for (std::size_t c = 0; c < row.errors.size(); ++c) l["errors"][res.table.columns[c]] = row.errors[c];
    levels.push_back(l);
  }
  j["levels"] = levels;
  for (std::size_t c = 0; c < res.checks.size(); ++c) {
    const auto& chk = res.checks[c];
    json r;
    r["slope"] = chk.observed ? json(*chk.observed) : json(nullptr);
    r["expected"] = chk.expected ? json(*chk.expected) : json(nullptr);
    r["status"] = to_string(chk.status);
    json pw = json::array();
    for (const auto& p : res.rates[c].pairwise) pw.push_back(p ? json(*p) : json(nullptr));
    r["pairwise"] = pw;
    j["rates"][chk.column] = r;
  }
  j["passed"] = res.passed();
  return j;
}

/// gnuplot script with inline data blocks; log-log error curves per column.
inline std::string to_gnuplot(const StudyResult& res, const std::string& image = "errors.png") {
  std::ostringstream os;
  const std::string step = res.study == "fem-space" ? "h" : "tau";
  os << "set terminal pngcairo size 900,650\n";
  os << "set output '" << image << "'\n";
  os << "set logscale xy\nset key left top\nset grid\n";
  os << "set xlabel '" << step << "'\nset ylabel 'error'\n";
  os << "set title '" << res.study << " study: " << res.config.problem << ", q = " << res.config.q << "'\n";
  os << "$errors << EOD\n";
  for (std::size_t r = 0; r < res.table.rows.size(); ++r) {
    os << detail::fmt_double(res.steps[r]);
    for (double e : res.table.rows[r].errors) os << " " << detail::fmt_double(e > 0 ? e : 1e-300);
    os << "\n";
  }
  os << "EOD\n";
  os << "plot ";
  for (std::size_t c = 0; c < res.table.columns.size(); ++c) {
    os << (c ? ", \\\n     " : "") << "$errors using 1:" << c + 2 << " with linespoints title '" << res.table.columns[c]
       << "'";
  }
  os << "\n";
  return os.str();
}

/// Writes whichever of csv/json/plot paths are set in the config.
inline void write_outputs(const StudyResult& res) {
  const auto& cfg = res.config;
  if (!cfg.csv_path.empty()) detail::write_file(cfg.csv_path, to_csv(res));
  if (!cfg.json_path.empty()) detail::write_file(cfg.json_path, to_json(res).dump(2) + "\n");
  if (!cfg.plot_path.empty()) detail::write_file(cfg.plot_path, to_gnuplot(res));
}

}  // namespace dgtime::harness
