#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "curvlab/io.hpp"

namespace curvlab::cli {

/// Output of one subcommand: a CSV table, named assertions and free-form diagnostics.
class Report {
 public:
  Report(std::string command, std::vector<std::string> columns)
      : command_(std::move(command)), table_(std::move(columns)) {}

  CsvTable& table() { return table_; }
  nlohmann::ordered_json& diagnostics() { return diagnostics_; }

  /// Records an assertion and prints its PASS/FAIL line.
  bool check(const std::string& name, bool pass, double value, const std::string& relation, double bound) {
    assertions_.push_back({{"name", name},
                           {"pass", pass},
                           {"value", format_number(value)},
                           {"relation", relation},
                           {"bound", format_number(bound)}});
    std::cout << (pass ? "PASS " : "FAIL ") << name << "  value=" << format_number(value) << " (" << relation << " "
              << format_number(bound) << ")\n";
    ok_ = ok_ && pass;
    return pass;
  }

  void note(const std::string& line) const { std::cout << "     " << line << "\n"; }

  bool passed() const { return ok_; }

  /// Writes <dir>/<command>.csv and <dir>/<command>.json.
  void write(const std::string& dir, const std::map<std::string, std::string>& config) const {
    std::filesystem::create_directories(dir);
    const auto base = std::filesystem::path(dir) / command_;
    std::ofstream csv(base.string() + ".csv");
    table_.write(csv, config);
    nlohmann::ordered_json j;
    j["command"] = command_;
    j["schema"] = "curvlab-schema v1";
    j["measure"] = "dV/vol";
    j["config"] = config;
    j["assertions"] = assertions_;
    j["diagnostics"] = diagnostics_;
    j["passed"] = ok_;
    std::ofstream(base.string() + ".json") << j.dump(2) << "\n";
    if (!csv) throw Error("cannot write " + base.string() + ".csv");
  }

 private:
  std::string command_;
  CsvTable table_;
  nlohmann::ordered_json assertions_ = nlohmann::ordered_json::array();
  nlohmann::ordered_json diagnostics_ = nlohmann::ordered_json::object();
  bool ok_ = true;
};

using Command = int (*)(ExperimentConfig& cfg);

int biinvariant_check(ExperimentConfig& cfg);
int order_probe(ExperimentConfig& cfg);
int identity_check(ExperimentConfig& cfg);
int circle_ricci(ExperimentConfig& cfg);
int torus_ricci(ExperimentConfig& cfg);
int config_scan(ExperimentConfig& cfg);

/// Shared lookups.
inline std::string output_dir(ExperimentConfig& cfg) { return cfg.get_string("run.output", "curvlab-out"); }
inline unsigned long long seed(ExperimentConfig& cfg) {
  const int s = cfg.get_int("run.seed", 12345);
  if (s < 0) throw InputError("run.seed must be nonnegative");
  return static_cast<unsigned long long>(s);
}

inline int finish(const Report& r, ExperimentConfig& cfg, const std::string& dir) {
  r.write(dir, cfg.resolved());
  std::cout << (r.passed() ? "all assertions passed" : "some assertions FAILED") << "  (" << dir << ")\n";
  return r.passed() ? 0 : 1;
}

}  // namespace curvlab::cli
