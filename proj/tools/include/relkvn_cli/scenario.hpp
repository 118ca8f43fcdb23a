#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "relkvn/generators.hpp"
#include "relkvn/phase_flow.hpp"
#include "relkvn/state_io.hpp"

namespace relkvn::cli {

using nlohmann::json;

struct StateSpec {
  algebra::Representation representation = algebra::Representation::Velocity;
  std::vector<flow::GridAxis> axes;
  std::vector<double> centre;
  std::vector<double> width;
  std::string snapshot;  // absolute path; replaces the Gaussian when set
};

struct BoostSpec {
  int axis = 3;
  double rapidity = 0.0;
};

struct Tolerances {
  double algebra = 1e-9;
  double series = 1e-9;
  double boost = 1e-8;
  double shift = 1e-3;
  double norm_drift = 1e-6;  // per unit time
  double peak_cells = 2.0;
};

struct OutputSpec {
  std::string dir;
  flow::SnapshotEncoding encoding = flow::SnapshotEncoding::Text;
  int snapshots = 1;  // evolve intervals between written snapshots
};

/// Fully resolved run configuration. Physical quantities in c = 1 units.
struct Scenario {
  std::string name = "unnamed";
  double m0 = 1.0;
  std::map<std::string, double> parameters;
  std::string phi = "0";
  std::array<std::string, 3> A{"0", "0", "0"};
  std::optional<StateSpec> state;
  double dt = 1e-3;
  double t_end = 0.0;
  std::vector<BoostSpec> boosts;
  OutputSpec output;
  std::uint64_t seed = 0;
  int trials = 100;
  std::vector<double> probe_times{0.0, 1.7};
  std::string identity;
  int order = 6;
  double rapidity = 0.3;
  std::string mutate;
  Tolerances tolerances;

  generators::ForceField field() const;
  /// Parameters plus m0, for probes and numeric compilation.
  std::map<std::string, double> bindings() const;
};

/// Unknown keys, wrong types and unparsable expressions throw ConfigError.
/// Relative snapshot paths resolve against `base_dir`.
Scenario scenario_from_json(const json& doc, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);
json to_json(const Scenario& s);

}  // namespace relkvn::cli
