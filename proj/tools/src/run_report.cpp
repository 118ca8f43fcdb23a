#include "relkvn_cli/run_report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "relkvn/error.hpp"

namespace relkvn::cli {

bool RunReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.informational && !c.pass) return false;
  return true;
}

int RunReport::passed() const {
  int n = 0;
  for (const auto& c : checks) n += (!c.informational && c.pass) ? 1 : 0;
  return n;
}

int RunReport::asserted() const {
  int n = 0;
  for (const auto& c : checks) n += c.informational ? 0 : 1;
  return n;
}

const CheckResult* RunReport::find(const std::string& id) const {
  for (const auto& c : checks)
    if (c.id == id) return &c;
  return nullptr;
}

void RunReport::absorb(const std::string& prefix, const VerificationReport& report, double tolerance) {
  for (const auto& r : report.relations) {
    CheckResult c;
    c.id = prefix + "/" + r.id;
    c.residual = r.max_residual;
    c.tolerance = tolerance;
    c.pass = r.pass;
    c.informational = r.informational;
    c.detail = r.lhs + " = " + r.rhs;
    if (!r.note.empty()) c.detail += " (" + r.note + ")";
    checks.push_back(std::move(c));
  }
}

std::string RunReport::table() const {
  std::ostringstream os;
  char line[64];
  for (const auto& c : checks) {
    const char* tag = c.informational ? "info" : c.pass ? "PASS" : "FAIL";
    std::snprintf(line, sizeof line, "%-5s %11.3e %9.1e  ", tag, c.residual, c.tolerance);
    os << line << c.id;
    if (!c.detail.empty()) os << "   " << c.detail;
    os << '\n';
  }
  os << command << ": " << passed() << "/" << asserted() << " checks passed";
  if (asserted() != static_cast<int>(checks.size())) os << ", " << checks.size() - asserted() << " informational";
  std::snprintf(line, sizeof line, " (%.2f s)", wall_time);
  os << line << '\n';
  for (const auto& a : artifacts) os << "wrote " << a << '\n';
  return os.str();
}

json to_json(const RunReport& r) {
  json doc;
  doc["format"] = "relkvn-report/1";
  doc["command"] = r.command;
  doc["config"] = r.config;
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"id", c.id},
                      {"residual", c.residual},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass},
                      {"informational", c.informational},
                      {"detail", c.detail}});
  }
  doc["checks"] = checks;
  doc["summary"] = {{"passed", r.passed()}, {"asserted", r.asserted()}, {"pass", r.all_pass()},
                    {"exit_code", r.exit_code()}};
  doc["metrics"] = r.metrics;
  doc["wall_time_s"] = r.wall_time;
  doc["artifacts"] = r.artifacts;
  return doc;
}

RunReport report_from_json(const json& doc) {
  try {
    if (doc.at("format") != "relkvn-report/1") throw ParseError("not a relkvn report");
    RunReport r;
    r.command = doc.at("command").get<std::string>();
    r.config = doc.at("config");
    for (const auto& c : doc.at("checks")) {
      CheckResult x;
      x.id = c.at("id").get<std::string>();
      x.residual = c.at("residual").is_null() ? std::nan("") : c.at("residual").get<double>();
      x.tolerance = c.at("tolerance").get<double>();
      x.pass = c.at("pass").get<bool>();
      x.informational = c.at("informational").get<bool>();
      x.detail = c.at("detail").get<std::string>();
      r.checks.push_back(std::move(x));
    }
    r.metrics = doc.at("metrics");
    r.wall_time = doc.at("wall_time_s").get<double>();
    r.artifacts = doc.at("artifacts").get<std::vector<std::string>>();
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("report: ") + e.what());
  }
}

RunReport load_report(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open report '" + path + "'");
  try {
    return report_from_json(json::parse(is));
  } catch (const json::parse_error& e) {
    throw ParseError("report '" + path + "': " + e.what());
  }
}

void save_report(const RunReport& r, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << to_json(r).dump(2) << '\n';
}

}  // namespace relkvn::cli
