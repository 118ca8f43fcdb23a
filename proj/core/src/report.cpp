#include "relkvn/report.hpp"

#include <algorithm>
#include <cstdio>

namespace relkvn {

bool VerificationReport::all_pass() const {
  return std::all_of(relations.begin(), relations.end(), [](const auto& r) { return r.informational || r.pass; });
}

int VerificationReport::passed() const {
  return static_cast<int>(
      std::count_if(relations.begin(), relations.end(), [](const auto& r) { return !r.informational && r.pass; }));
}

int VerificationReport::asserted() const {
  return static_cast<int>(
      std::count_if(relations.begin(), relations.end(), [](const auto& r) { return !r.informational; }));
}

const RelationResult* VerificationReport::find(const std::string& id) const {
  auto it = std::find_if(relations.begin(), relations.end(), [&](const auto& r) { return r.id == id; });
  return it == relations.end() ? nullptr : &*it;
}

std::string VerificationReport::table() const {
  std::string out = suite + "\n";
  char line[512];
  for (const auto& r : relations) {
    std::snprintf(line, sizeof line, "  %-28s %-6s residual=%-10.3e trials=%-4d %s\n", r.id.c_str(),
                  r.informational ? "info" : (r.pass ? "pass" : "FAIL"), r.max_residual, r.trials,
                  r.note.c_str());
    out += line;
  }
  std::snprintf(line, sizeof line, "  %d/%d asserted relations pass\n", passed(), asserted());
  out += line;
  return out;
}

}  // namespace relkvn
