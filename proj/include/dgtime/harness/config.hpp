#pragma once

// Study configuration files: INI-style sections with key = value lines,
// comments start with ';' or '#'. Errors carry the offending line number.
//
//   [study]
//   problem = system2          ; registry id or letter
//   q = 1
//   k = 1                      ; FEM degree
//   ladder = 8 16 32 64        ; N, or n in FEM space mode
//   T = 1
//   grading = 1
//   mode = space               ; FEM: space | time
//   reference = exact          ; FEM time mode: exact | semidiscrete
//   fixed_slabs = 32           ; FEM space mode
//   fixed_mesh = 256           ; FEM time mode
//   norms = nodal, L2V         ; gated columns, default all
//   margin = 0.2
//   seed = 1
//
//   [output]
//   csv = table.csv
//   json = summary.json
//   plot = curves.gp

#include "dgtime/harness/study.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dgtime::harness {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, int line) : std::runtime_error(format(msg, line)), line_(line) {}
  [[nodiscard]] int line() const { return line_; }

 private:
  static std::string format(const std::string& msg, int line) {
    return line > 0 ? "config line " + std::to_string(line) + ": " + msg : "config: " + msg;
  }
  int line_;
};

namespace detail {

inline std::string trim(std::string s) {
  const auto ws = " \t\r\n";
  s.erase(0, s.find_first_not_of(ws));
  s.erase(s.find_last_not_of(ws) + 1);
  return s;
}

/// Line number of key inside [section], 0 if not found.
inline int key_line(const std::vector<std::string>& lines, const std::string& section, const std::string& key) {
  std::string current;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string l = trim(lines[i]);
    if (l.empty() || l[0] == ';' || l[0] == '#') continue;
    if (l.front() == '[' && l.back() == ']') {
      current = trim(l.substr(1, l.size() - 2));
    } else if (current == section) {
      const auto eq = l.find('=');
      if (eq != std::string::npos && trim(l.substr(0, eq)) == key) return static_cast<int>(i + 1);
    }
  }
  return 0;
}

/// Drops a trailing comment introduced by whitespace followed by ';' or '#'.
inline std::string strip_inline_comment(const std::string& line) {
  for (std::size_t i = 1; i < line.size(); ++i) {
    if ((line[i] == ';' || line[i] == '#') && (line[i - 1] == ' ' || line[i - 1] == '\t')) return line.substr(0, i);
  }
  return line;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::string norm = s;
  std::replace(norm.begin(), norm.end(), ',', ' ');
  std::istringstream ss(norm);
  std::vector<std::string> out;
  for (std::string t; ss >> t;) out.push_back(t);
  return out;
}

}  // namespace detail

/// Parses the text of a config file. Unknown sections or keys are errors.
inline StudyConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  std::vector<std::string> lines;
  std::string cleaned;
  {
    std::istringstream ss(text);
    for (std::string l; std::getline(ss, l);) {
      lines.push_back(detail::strip_inline_comment(l));
      cleaned += lines.back() + "\n";
    }
  }
  pt::ptree tree;
  try {
    std::istringstream ss(cleaned);
    pt::read_ini(ss, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.message(), static_cast<int>(e.line()));
  }

  const std::set<std::string> study_keys{"problem", "q",         "k",           "ladder",     "T",     "grading", "mode",
                                         "reference", "fixed_slabs", "fixed_mesh", "norms", "margin",  "seed"};
  const std::set<std::string> output_keys{"csv", "json", "plot"};
  StudyConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("key '" + section + "' outside a section", detail::key_line(lines, "", section));
    }
    const std::set<std::string>* allowed = section == "study" ? &study_keys : section == "output" ? &output_keys : nullptr;
    if (!allowed) {
      int line = 0;
      for (std::size_t i = 0; i < lines.size(); ++i)
        if (detail::trim(lines[i]) == "[" + section + "]") line = static_cast<int>(i + 1);
      throw ConfigError("unknown section [" + section + "]", line);
    }
    for (const auto& [key, node] : body) {
      const int line = detail::key_line(lines, section, key);
      if (!allowed->count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]", line);
      const std::string value = detail::trim(node.data());
      auto as_int = [&]() {
        std::size_t pos = 0;
        int v = 0;
        try {
          v = std::stoi(value, &pos);
        } catch (const std::exception&) {
          pos = std::string::npos;
        }
        if (pos != value.size()) throw ConfigError("'" + key + "' expects an integer, got '" + value + "'", line);
        return v;
      };
      auto as_double = [&]() {
        std::size_t pos = 0;
        double v = 0;
        try {
          v = std::stod(value, &pos);
        } catch (const std::exception&) {
          pos = std::string::npos;
        }
        if (pos != value.size()) throw ConfigError("'" + key + "' expects a number, got '" + value + "'", line);
        return v;
      };
      if (section == "output") {
        if (value.empty()) throw ConfigError("empty output path for '" + key + "'", line);
        (key == "csv" ? cfg.csv_path : key == "json" ? cfg.json_path : cfg.plot_path) = value;
      } else if (key == "problem") {
        bool known = false;
        for (const auto& p : registry()) known = known || p.id == value || p.label == value;
        if (!known) throw ConfigError("unknown problem '" + value + "'", line);
        cfg.problem = value;
      } else if (key == "q") {
        cfg.q = as_int();
      } else if (key == "k") {
        cfg.k = as_int();
      } else if (key == "ladder") {
        cfg.ladder.clear();
        for (const auto& tok : detail::split_list(value)) {
          std::size_t pos = 0;
          int v = 0;
          try {
            v = std::stoi(tok, &pos);
          } catch (const std::exception&) {
            pos = std::string::npos;
          }
          if (pos != tok.size()) throw ConfigError("ladder entry '" + tok + "' is not an integer", line);
          cfg.ladder.push_back(v);
        }
      } else if (key == "T") {
        cfg.final_time = as_double();
      } else if (key == "grading") {
        cfg.grading = as_double();
      } else if (key == "mode") {
        if (value != "space" && value != "time") throw ConfigError("mode must be 'space' or 'time'", line);
        cfg.fem_mode = value == "space" ? FemMode::space : FemMode::time;
      } else if (key == "reference") {
        if (value != "exact" && value != "semidiscrete") {
          throw ConfigError("reference must be 'exact' or 'semidiscrete'", line);
        }
        cfg.reference = value == "exact" ? FemReference::exact : FemReference::semidiscrete;
      } else if (key == "fixed_slabs") {
        cfg.fixed_slabs = as_int();
      } else if (key == "fixed_mesh") {
        cfg.fixed_mesh = as_int();
      } else if (key == "norms") {
        cfg.norms = detail::split_list(value);
      } else if (key == "margin") {
        cfg.margin = as_double();
      } else if (key == "seed") {
        cfg.seed = static_cast<unsigned>(as_int());
      }
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    int line = 0;
    for (const char* key : {"ladder", "q", "T", "grading", "margin"}) {
      if (msg.rfind(key, 0) == 0) line = detail::key_line(lines, "study", key);
    }
    throw ConfigError(msg, line);
  }
  return cfg;
}

inline StudyConfig load_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open '" + path + "'", 0);
  std::ostringstream ss;
  ss << is.rdbuf();
  std::string text = ss.str();
  if (text.rfind("\xEF\xBB\xBF", 0) == 0) text.erase(0, 3);  // UTF-8 BOM
  return parse_config(text);
}

}  // namespace dgtime::harness
