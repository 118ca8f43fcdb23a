#pragma once

#include <string>

#include "relkvn_cli/run_report.hpp"
#include "relkvn_cli/scenario.hpp"

namespace relkvn::cli {

/// Closure, force equation, Euler-Lagrange, canonical momentum, Poisson
/// correspondence and the A -> 0 reduction of the momentum Liouvillian.
RunReport cmd_verify_algebra(const Scenario& s);
/// Evolves the scenario state to t_end; writes snapshots, expectations.csv and
/// trajectory.csv under output.dir when it is set.
RunReport cmd_evolve(const Scenario& s);
/// identity: c1-momentum, c1-lambda, c2, boost-velocity, boost-4vector, boost-position.
RunReport cmd_series_check(const Scenario& s);
RunReport cmd_boost(const Scenario& s);
/// Normal form of an operator expression.
RunReport cmd_operator(const Scenario& s, const std::string& text, const std::string& representation);

/// Dispatches on a report's command name with its embedded configuration.
RunReport run_command(const std::string& command, const Scenario& s);

}  // namespace relkvn::cli
