#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "relkvn/report.hpp"

namespace relkvn::cli {

using nlohmann::json;

struct CheckResult {
  std::string id;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool informational = false;
  std::string detail;
};

struct RunReport {
  std::string command;
  json config;
  std::vector<CheckResult> checks;
  json metrics = json::object();
  double wall_time = 0.0;
  std::vector<std::string> artifacts;

  bool all_pass() const;
  int passed() const;
  int asserted() const;
  int exit_code() const { return all_pass() ? 0 : 1; }
  const CheckResult* find(const std::string& id) const;

  /// Appends every relation of `report`, ids prefixed with `prefix/`.
  void absorb(const std::string& prefix, const VerificationReport& report, double tolerance);
  std::string table() const;
};

json to_json(const RunReport& r);
RunReport report_from_json(const json& doc);
RunReport load_report(const std::string& path);
void save_report(const RunReport& r, const std::string& path);

}  // namespace relkvn::cli
