#include "relkvn_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <ostream>

#include "CLI11.hpp"
#include "relkvn/error.hpp"
#include "relkvn_cli/commands.hpp"

namespace relkvn::cli {

namespace {

bool same_residual(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return std::memcmp(&a, &b, sizeof a) == 0;
}

// Recomputes `original` from its embedded configuration and appends the comparison.
RunReport rerun(const RunReport& original, Scenario s) {
  RunReport fresh = run_command(original.command, s);
  double worst = 0.0;
  std::string mismatch;
  if (fresh.checks.size() != original.checks.size()) mismatch = "check count differs";
  for (std::size_t k = 0; mismatch.empty() && k < fresh.checks.size(); ++k) {
    const CheckResult& a = original.checks[k];
    const CheckResult& b = fresh.checks[k];
    if (a.id != b.id) {
      mismatch = "check " + a.id + " became " + b.id;
    } else if (!same_residual(a.residual, b.residual) || a.pass != b.pass) {
      worst = std::max(worst, std::abs(a.residual - b.residual));
      mismatch = "residual of " + a.id + " changed";
    }
  }
  CheckResult c;
  c.id = "rerun/identical-residuals";
  c.residual = worst;
  c.pass = mismatch.empty();
  c.detail = mismatch.empty() ? std::to_string(original.checks.size()) + " residuals reproduced bit for bit" : mismatch;
  fresh.checks.push_back(c);
  return fresh;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Relativistic KvN mechanics: operator-algebra checks, phase-space transport and boosts", "relkvn"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir, mutate, format = "text";
  std::uint64_t seed = 0;
  double tol = 0.0;
  int order = 0;
  app.add_option("--scenario", scenario_path, "Scenario file (JSON)");
  auto* seed_opt = app.add_option("--seed", seed, "Probe seed");
  auto* tol_opt = app.add_option("--tol", tol, "Tolerance of the symbolic probes");
  auto* order_opt = app.add_option("--order", order, "Series order");
  app.add_option("--out", out_dir, "Directory for the report and artifacts");
  app.add_option("--mutate", mutate, "Corrupt a generator (negative control)")->check(CLI::IsMember({"K", "L"}));
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "machine"}));

  auto* verify = app.add_subcommand("verify-algebra", "Poincaré closure and the operator relations");
  auto* evolve = app.add_subcommand("evolve", "Transport the scenario state to t_end");
  auto* series = app.add_subcommand("series-check", "Order-by-order series identities");
  std::string identity;
  series->add_option("--identity", identity, "c1-momentum|c1-lambda|c2|boost-velocity|boost-4vector|boost-position");
  auto* boost = app.add_subcommand("boost", "Apply the scenario boosts to a velocity state");
  auto* again = app.add_subcommand("rerun", "Recompute a report from its embedded configuration");
  std::string report_path;
  again->add_option("report", report_path, "Report file")->required();
  auto* op = app.add_subcommand("op", "Normal form of an operator expression");
  std::string op_text, op_rep = "velocity";
  op->add_option("expression", op_text, "e.g. comm(K3, V3)")->required();
  op->add_option("--rep", op_rep, "velocity or momentum")->check(CLI::IsMember({"velocity", "momentum"}));
  for (auto* sub : {verify, evolve, series, boost, again, op}) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kPass : kConfigError;
  }

  try {
    Scenario s;
    RunReport original;
    if (again->parsed()) {
      original = load_report(report_path);
      s = scenario_from_json(original.config);
      s.output.dir.clear();
    } else if (!scenario_path.empty()) {
      s = load_scenario(scenario_path);
    }
    if (seed_opt->count()) s.seed = seed;
    if (tol_opt->count()) {
      if (!(tol > 0.0)) throw ConfigError("--tol must be positive");
      s.tolerances.algebra = s.tolerances.series = s.tolerances.boost = tol;
    }
    if (order_opt->count()) s.order = order;
    if (!out_dir.empty()) s.output.dir = out_dir;
    if (!mutate.empty()) s.mutate = mutate;
    if (!identity.empty()) s.identity = identity;

    RunReport report;
    if (again->parsed()) {
      report = rerun(original, s);
      report.metrics["rerun_of"] = std::filesystem::absolute(report_path).string();
    } else if (op->parsed()) {
      report = cmd_operator(s, op_text, op_rep);
    } else {
      report = run_command(app.get_subcommands().front()->get_name(), s);
    }

    if (!s.output.dir.empty()) {
      std::filesystem::create_directories(s.output.dir);
      const std::string path = (std::filesystem::path(s.output.dir) / "report.json").string();
      report.artifacts.push_back(path);
      save_report(report, path);
    }
    if (format == "machine") {
      out << to_json(report).dump(2) << '\n';
    } else if (op->parsed()) {
      out << report.metrics["normal_form"].get<std::string>() << '\n';
      out << "hermitian: " << (report.metrics["hermitian"].get<bool>() ? "yes" : "no") << '\n';
    } else {
      out << report.table();
    }
    return report.exit_code();
  } catch (const ConfigError& e) {
    err << "relkvn: config error: " << e.what() << '\n';
  } catch (const ParseError& e) {
    err << "relkvn: config error: " << e.what() << '\n';
  } catch (const UnknownIdentity& e) {
    err << "relkvn: config error: " << e.what() << '\n';
  } catch (const RepresentationMismatch& e) {
    err << "relkvn: config error: " << e.what() << '\n';
  } catch (const OrderCapExceeded& e) {
    err << "relkvn: config error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "relkvn: runtime error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kConfigError;
}

}  // namespace relkvn::cli
