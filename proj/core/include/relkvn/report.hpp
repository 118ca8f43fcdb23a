#pragma once

#include <string>
#include <vector>

namespace relkvn {

/// One checked relation. Informational rows are measured and reported but
/// never counted against the suite.
struct RelationResult {
  std::string id;
  std::string lhs;
  std::string rhs;
  double max_residual = 0.0;
  int trials = 0;
  bool pass = false;
  bool informational = false;
  std::string note;
};

struct VerificationReport {
  std::string suite;
  std::vector<RelationResult> relations;

  bool all_pass() const;
  int passed() const;
  int asserted() const;
  const RelationResult* find(const std::string& id) const;
  std::string table() const;
};

}  // namespace relkvn
