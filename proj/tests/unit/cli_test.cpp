#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "relkvn/error.hpp"
#include "relkvn/state_io.hpp"
#include "relkvn_cli/cli.hpp"
#include "relkvn_cli/commands.hpp"

namespace {

using namespace relkvn;
using namespace relkvn::cli;
namespace fs = std::filesystem;

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "relkvn_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string write(const std::string& name, const std::string& text) {
  const auto path = (scratch() / name).string();
  std::ofstream(path) << text;
  return path;
}

struct Invocation {
  int code;
  std::string out, err;
};

Invocation relkvn_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

json machine(const std::vector<std::string>& args, int expected_code) {
  auto a = args;
  a.insert(a.end(), {"--format", "machine"});
  const auto r = relkvn_cli(a);
  EXPECT_EQ(r.code, expected_code) << r.err;
  return json::parse(r.out);
}

const char* kBoostGrid = R"("axes": [
      {"variable": "v1", "min": -0.999, "max": 0.999, "points": 201},
      {"variable": "v3", "min": -0.999, "max": 0.999, "points": 201}])";

}  // namespace

TEST(Scenario, UnknownKeysRejected) {
  EXPECT_THROW(scenario_from_json(json::parse(R"({"mass": 1})")), ConfigError);
  EXPECT_THROW(scenario_from_json(json::parse(R"({"integrator": {"dt": 0.1, "steps": 3}})")), ConfigError);
  EXPECT_THROW(scenario_from_json(json::parse(R"({"boosts": [{"axis": 3, "rapidity": 0.1, "v": 1}]})")), ConfigError);
  EXPECT_THROW(scenario_from_json(json::parse(R"({"m0": "one"})")), ConfigError);
  EXPECT_THROW(scenario_from_json(json::parse(R"({"field": {"phi": "x1 +"}})")), ConfigError);
  EXPECT_THROW(scenario_from_json(json::parse(R"({"state": {"centre": [0], "width": [1, 1]}})")), ConfigError);
  EXPECT_THROW(scenario_from_json(json::parse(R"({"state": {"representation": "momentum",
      "axes": [{"variable": "v1", "min": -0.5, "max": 0.5, "points": 9}], "centre": [0], "width": [0.1]}})")),
               RepresentationMismatch);
}

TEST(Scenario, ResolvedConfigRoundTrips) {
  const Scenario s = scenario_from_json(json::parse(R"({
    "m0": 2, "parameters": {"B0": 0.5}, "field": {"A": ["-x2*B0", "0", "0"]},
    "state": {"dims": 1, "centre": [0, 0.1], "width": [1, 0.1]},
    "boosts": [{"axis": 1, "velocity": 0.5}], "seed": 7})"));
  EXPECT_NEAR(s.boosts[0].rapidity, std::atanh(0.5), 1e-15);
  ASSERT_TRUE(s.state.has_value());
  EXPECT_EQ(s.state->axes.size(), 2u);
  EXPECT_EQ(s.state->axes[0].points, 512);
  const json once = to_json(s);
  EXPECT_EQ(to_json(scenario_from_json(once)), once);
  EXPECT_EQ(s.bindings().at("m0"), 2.0);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(relkvn_cli({"verify-algebra"}).code, kPass);
  EXPECT_EQ(relkvn_cli({"verify-algebra", "--mutate", "K"}).code, kCheckFailure);
  EXPECT_EQ(relkvn_cli({"verify-algebra", "--scenario", write("bad.json", R"({"colour": 1})")}).code, kConfigError);
  EXPECT_EQ(relkvn_cli({"verify-algebra", "--scenario", "/nonexistent/s.json"}).code, kConfigError);
  EXPECT_EQ(relkvn_cli({"series-check", "--identity", "c3"}).code, kConfigError);
  EXPECT_EQ(relkvn_cli({"series-check"}).code, kConfigError);
  EXPECT_EQ(relkvn_cli({"frobnicate"}).code, kConfigError);
  EXPECT_EQ(relkvn_cli({"--help"}).code, kPass);
  EXPECT_EQ(relkvn_cli({"evolve"}).code, kConfigError);  // no state
  const std::string blocker = write("blocker", "x");
  const auto r = relkvn_cli({"verify-algebra", "--out", blocker + "/sub"});
  EXPECT_EQ(r.code, kRuntimeError) << r.err;
}

TEST(VerifyAlgebra, FreeClosureAndNamedMutation) {
  const json free = machine({"verify-algebra"}, 0);
  EXPECT_EQ(free["metrics"]["closure"]["closure/velocity/t=0"], "45/45");
  EXPECT_EQ(free["metrics"]["closure"]["closure/velocity/t=1.7"], "45/45");
  EXPECT_EQ(free["metrics"]["closure"]["closure/momentum/t=0"], "45/45");

  const json bad = machine({"verify-algebra", "--mutate", "K"}, 1);
  bool named = false;
  for (const auto& c : bad["checks"]) {
    if (c["informational"].get<bool>() || c["pass"].get<bool>()) continue;
    const std::string id = c["id"];
    EXPECT_EQ(id.rfind("closure/", 0), 0u) << id;
    EXPECT_NE(id.substr(id.rfind('/')).find('K'), std::string::npos) << id;
    named = named || id == "closure/velocity/t=0/[J1,K2]";
  }
  EXPECT_TRUE(named);
}

TEST(VerifyAlgebra, MagneticScenario) {
  const std::string path = write("magnetic.json", R"({"parameters": {"B0": 1.5},
      "field": {"A": ["-x2*B0", "0", "0"]}})");
  const RunReport r = cmd_verify_algebra(load_scenario(path));
  EXPECT_TRUE(r.all_pass()) << r.table();
  for (int i = 1; i <= 3; ++i) EXPECT_TRUE(r.find("force-equation/force" + std::to_string(i))->pass);
  EXPECT_TRUE(r.find("euler-lagrange/mismatched")->pass);
  EXPECT_GT(r.find("euler-lagrange/mismatched")->residual, 1e-3);
  EXPECT_TRUE(r.find("poisson/dH/dx2")->pass);
  EXPECT_TRUE(r.find("closure/velocity/t=0/[K1,L]")->informational);
}

TEST(SeriesCheck, C1Coefficients) {
  const json r = machine({"series-check", "--identity", "c1-momentum", "--order", "6"}, 0);
  const std::vector<std::string> head(r["metrics"]["coefficients"].begin(), r["metrics"]["coefficients"].begin() + 3);
  EXPECT_EQ(head, (std::vector<std::string>{"1/2", "3/8", "5/16"}));
  EXPECT_EQ(r["config"]["series"]["order"], 6);
}

TEST(SeriesCheck, BoostIdentities) {
  EXPECT_EQ(relkvn_cli({"series-check", "--identity", "boost-velocity", "--order", "4"}).code, 0);
  EXPECT_EQ(relkvn_cli({"series-check", "--identity", "boost-4vector", "--order", "4"}).code, 0);
  const json pos = machine({"series-check", "--identity", "boost-position", "--order", "4"}, 0);
  int info = 0;
  for (const auto& c : pos["checks"]) {
    const std::string id = c["id"];
    if (id.find("order3") != std::string::npos || id.find("order4") != std::string::npos) {
      EXPECT_TRUE(c["informational"].get<bool>()) << id;
      ++info;
    }
  }
  EXPECT_EQ(info, 6);
}

TEST(EvolveCommand, FreeGaussianShiftAndArtifacts) {
  const std::string path = write("free_gaussian.json", R"({
    "state": {"dims": 1, "centre": [-1.0, 0.3], "width": [0.8, 0.1]},
    "integrator": {"dt": 0.05, "t_end": 2.0}, "output": {"snapshots": 2}})");
  const fs::path out = scratch() / "evolve_free";
  fs::remove_all(out);
  const json r = machine({"evolve", "--scenario", path, "--out", out.string()}, 0);
  bool shifted = false;
  for (const auto& c : r["checks"]) {
    if (c["id"] == "free-shift/x1") {
      shifted = c["pass"].get<bool>();
      EXPECT_LE(c["residual"].get<double>(), 1e-3);
    }
  }
  EXPECT_TRUE(shifted);
  const auto c0 = r["metrics"]["centroid_initial"], c1 = r["metrics"]["centroid_final"];
  EXPECT_NEAR(c1[0].get<double>(), c0[0].get<double>() + 2 * c0[1].get<double>(), 1e-3);

  const auto last = flow::read_snapshot((out / "snapshot_002.kvn").string());
  EXPECT_DOUBLE_EQ(last.time(), 2.0);
  std::ifstream csv(out / "expectations.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "t,x1,v1,norm");
  EXPECT_TRUE(fs::exists(out / "report.json"));
  EXPECT_EQ(load_report((out / "report.json").string()).checks.size(), r["checks"].size());
}

TEST(EvolveCommand, ZeroStepReturnsInput) {
  const std::string path = write("zero.json", R"({"state": {"dims": 1, "centre": [0.5, 0.1], "width": [1, 0.1]},
      "output": {"dir": ")" + (scratch() / "zero").string() + R"("}})");
  const RunReport r = cmd_evolve(load_scenario(path));
  EXPECT_TRUE(r.find("zero-step")->pass);
  EXPECT_EQ(r.find("zero-step")->residual, 0.0);
  const auto a = flow::read_snapshot((scratch() / "zero" / "snapshot_000.kvn").string());
  EXPECT_EQ(a.time(), 0.0);
}

TEST(EvolveCommand, ConstantForcePeakTracksTrajectory) {
  const std::string path = write("cf.json", R"({"parameters": {"F": 1}, "field": {"phi": "-F*x1"},
    "state": {"representation": "momentum",
      "axes": [{"variable": "x1", "min": -4, "max": 8, "points": 384}, {"variable": "p1", "min": -2, "max": 5, "points": 351}],
      "centre": [0, 0], "width": [0.5, 0.15]},
    "integrator": {"dt": 0.05, "t_end": 3.0}, "output": {"snapshots": 3}})");
  const RunReport r = cmd_evolve(load_scenario(path));
  EXPECT_TRUE(r.all_pass()) << r.table();
  EXPECT_LE(r.find("peak-trajectory")->residual, 2.0);
  EXPECT_NEAR(r.metrics["centroid_final"][1].get<double>(), 3.0, 1e-6);
}

TEST(BoostCommand, PeaksFollowVelocityAddition) {
  const auto transverse = load_scenario(write("bt.json", std::string(R"({"state": {)") + kBoostGrid +
                                                           R"(, "centre": [0.3, 0], "width": [0.02, 0.02]},
      "boosts": [{"axis": 3, "velocity": 0.5}]})"));
  const RunReport t = cmd_boost(transverse);
  EXPECT_TRUE(t.all_pass()) << t.table();
  EXPECT_NEAR(t.metrics["peak_expected"][0].get<double>(), 0.2598, 0.5 * 1.998 / 200);  // starts from the nearest node
  EXPECT_NEAR(t.metrics["peak_expected"][2].get<double>(), -0.5, 1e-12);
  EXPECT_NEAR(t.metrics["peak_final"][0].get<double>(), 0.2598, 2 * 1.998 / 200);
  EXPECT_NEAR(t.metrics["peak_final"][2].get<double>(), -0.5, 2 * 1.998 / 200);

  const auto comoving = load_scenario(write("bc.json", std::string(R"({"state": {)") + kBoostGrid +
                                                         R"(, "centre": [0, 0.5], "width": [0.02, 0.02]},
      "boosts": [{"axis": 3, "velocity": 0.5}]})"));
  const RunReport c = cmd_boost(comoving);
  EXPECT_TRUE(c.all_pass()) << c.table();
  EXPECT_NEAR(c.metrics["peak_final"][2].get<double>(), 0.0, 2 * 1.998 / 200);

  auto still = comoving;
  still.boosts = {{3, 0.0}};
  const RunReport s = cmd_boost(still);
  EXPECT_TRUE(s.find("identity")->pass);
}

TEST(BoostCommand, Errors) {
  const auto mom = load_scenario(write("bm.json", R"({"state": {"representation": "momentum", "centre": [0, 0],
      "width": [1, 0.5]}, "boosts": [{"axis": 1, "rapidity": 0.1}]})"));
  EXPECT_THROW(cmd_boost(mom), RepresentationMismatch);
  const auto missing = load_scenario(write("bx.json", R"({"state": {"dims": 1, "centre": [0, 0],
      "width": [1, 0.1]}, "boosts": [{"axis": 3, "rapidity": 0.1}]})"));
  EXPECT_THROW(cmd_boost(missing), ConfigError);
}

TEST(Rerun, ReproducesResiduals) {
  const fs::path out = scratch() / "rerun";
  const std::string path = write("rr.json", R"({"parameters": {"B0": 1}, "field": {"A": ["-x2*B0", "0", "0"]},
      "seed": 3, "probe": {"trials": 20}})");
  ASSERT_EQ(relkvn_cli({"verify-algebra", "--scenario", path, "--out", out.string()}).code, 0);
  const json again = machine({"rerun", (out / "report.json").string()}, 0);
  const auto& checks = again["checks"];
  EXPECT_EQ(checks.back()["id"], "rerun/identical-residuals");
  EXPECT_TRUE(checks.back()["pass"].get<bool>());
  EXPECT_EQ(again["config"]["seed"], 3);

  RunReport r = load_report((out / "report.json").string());
  EXPECT_EQ(to_json(report_from_json(to_json(r)))["checks"], to_json(r)["checks"]);
}

TEST(OperatorCommand, NormalForm) {
  const auto r = relkvn_cli({"op", "comm(Lx1, X1)"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "-i");
  EXPECT_EQ(relkvn_cli({"op", "comm(X1, P1"}).code, kConfigError);
}
