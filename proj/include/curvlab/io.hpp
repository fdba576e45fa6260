#pragma once

// Experiment configuration files (key = value, [section] headers) and CSV output.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvlab/errors.hpp"

namespace curvlab {

namespace detail {
inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}
}  // namespace detail

/// Shortest round-tripping decimal form.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  for (int prec = 6; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

/// Flat key/value configuration. Keys inside "[section]" become "section.key".
///
/// Every lookup records the resolved value, so resolved() lists defaults as well as the
/// values that were given. unused() reports keys no lookup asked for.
class ExperimentConfig {
 public:
  static ExperimentConfig parse(std::istream& in, const std::string& origin = "<config>") {
    ExperimentConfig c;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
      line = detail::trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') throw InputError(origin + ":" + std::to_string(lineno) + ": unterminated section");
        section = detail::trim(line.substr(1, line.size() - 2));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw InputError(origin + ":" + std::to_string(lineno) + ": expected key = value");
      const std::string key = detail::trim(line.substr(0, eq));
      if (key.empty()) throw InputError(origin + ":" + std::to_string(lineno) + ": empty key");
      c.set(section.empty() ? key : section + "." + key, detail::trim(line.substr(eq + 1)));
    }
    return c;
  }

  static ExperimentConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file: " + path);
    return parse(in, path);
  }

  void set(const std::string& key, const std::string& value) { given_[key] = value; }

  /// "key=value" as given on the command line.
  void set_assignment(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw InputError("--set expects key=value, got '" + text + "'");
    set(detail::trim(text.substr(0, eq)), detail::trim(text.substr(eq + 1)));
  }

  bool has(const std::string& key) const { return given_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& def) {
    const auto it = given_.find(key);
    const std::string v = it == given_.end() ? def : it->second;
    resolved_[key] = v;
    return v;
  }

  double get_double(const std::string& key, double def) {
    const std::string raw = get_string(key, format_number(def));
    try {
      std::size_t pos = 0;
      const double v = std::stod(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument(raw);
      return v;
    } catch (const std::exception&) {
      throw InputError("config key '" + key + "' must be a number, got '" + raw + "'");
    }
  }

  int get_int(const std::string& key, int def) {
    const double v = get_double(key, def);
    if (v != std::floor(v)) throw InputError("config key '" + key + "' must be an integer");
    return static_cast<int>(v);
  }

  bool get_bool(const std::string& key, bool def) {
    const std::string v = get_string(key, def ? "true" : "false");
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw InputError("config key '" + key + "' must be true or false");
  }

  /// Comma-separated list.
  std::vector<std::string> get_list(const std::string& key, const std::string& def) {
    std::vector<std::string> out;
    std::stringstream ss(get_string(key, def));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = detail::trim(item);
      if (!item.empty()) out.push_back(item);
    }
    return out;
  }

  std::vector<double> get_doubles(const std::string& key, const std::string& def) {
    std::vector<double> out;
    for (const auto& s : get_list(key, def)) {
      try {
        out.push_back(std::stod(s));
      } catch (const std::exception&) {
        throw InputError("config key '" + key + "' has a non-numeric entry '" + s + "'");
      }
    }
    return out;
  }

  std::vector<std::string> unused() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : given_)
      if (!resolved_.count(k)) out.push_back(k);
    return out;
  }

  void reject_unused() const {
    const auto u = unused();
    if (u.empty()) return;
    std::string msg = "unknown config key(s):";
    for (const auto& k : u) msg += " " + k;
    throw InputError(msg);
  }

  /// Resolved configuration, sorted by key.
  const std::map<std::string, std::string>& resolved() const { return resolved_; }

 private:
  std::map<std::string, std::string> given_;
  std::map<std::string, std::string> resolved_;
};

inline constexpr const char* kCsvSchema = "# curvlab-schema v1";

/// A CSV table with the schema line and the resolved configuration as leading comments.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(std::vector<std::string> cells) {
    detail::require(cells.size() == columns_.size(), "CSV row has the wrong number of cells");
    rows_.push_back(std::move(cells));
  }

  std::size_t size() const { return rows_.size(); }

  void write(std::ostream& out, const std::map<std::string, std::string>& config) const {
    out << kCsvSchema << "\n";
    for (const auto& [k, v] : config) out << "# " << k << " = " << v << "\n";
    write_row(out, columns_);
    for (const auto& r : rows_) write_row(out, r);
  }

 private:
  static void write_row(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ",";
      const bool quote = cells[i].find_first_of(",\"\n") != std::string::npos;
      if (!quote) {
        out << cells[i];
        continue;
      }
      out << '"';
      for (char ch : cells[i]) out << (ch == '"' ? "\"\"" : std::string(1, ch));
      out << '"';
    }
    out << "\n";
  }

  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace curvlab
