// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "relkvn/generators.hpp"
#include "relkvn/phase_flow.hpp"
#include "relkvn/series.hpp"
#include "relkvn_cli/cli.hpp"

namespace {

using namespace relkvn;
using algebra::OperatorExpr;
using algebra::Representation;
using flow::GridAxis;
using flow::Vec3d;
using generators::ForceField;
using symbolic::ScalarExpr;

constexpr auto kVel = Representation::Velocity;

struct Outcome {
  bool pass = false;
  std::string detail;
};

symbolic::ProbeOptions probe(double tol = 1e-9) {
  symbolic::ProbeOptions o;
  o.trials = 100;
  o.tol = tol;
  o.seed = 0;
  return o;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double cells(double a, double b, const GridAxis& ax) { return std::abs(a - b) / ax.step(); }

double bump(double x, double c, double w) { return std::exp(-(x - c) * (x - c) / (4 * w * w)); }

ForceField magnetic() {
  ForceField f;
  f.A = {-symbolic::x(2) * symbolic::param("B0"), 0, 0};
  return f;
}

ForceField linear_phi() {
  ForceField f;
  f.phi = symbolic::x(1);
  return f;
}

// CLI invocation with captured output.
int cli(const std::vector<std::string>& args, std::string& out) {
  std::ostringstream os, es;
  const int code = cli::run(args, os, es);
  out = os.str() + es.str();
  return code;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto dir = std::filesystem::temp_directory_path() / "relkvn_acceptance";
  std::filesystem::create_directories(dir);
  const auto path = (dir / name).string();
  std::ofstream(path) << text;
  return path;
}

Outcome closure(bool momentum) {
  const ScalarExpr m0 = symbolic::param("m0");
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int passed = 0, total = 0;
  for (double t : {0.0, 1.7}) {
    const auto gen = momentum ? generators::build_momentum_generators(m0, ScalarExpr::constant(t))
                              : generators::build_free_generators(m0, ScalarExpr::constant(t));
    const auto rep = generators::verify_poincare_closure(gen, probe());
    for (const auto& r : rep.relations) {
      worst = std::max(worst, r.max_residual);
      passed += r.pass ? 1 : 0;
      ++total;
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {passed == 90 && total == 90 && worst <= 1e-9 && secs <= 60.0,
          std::to_string(passed) + "/" + std::to_string(total) + fmt(" brackets, max residual %.2e, %.2f s", worst, secs)};
}

Outcome force_equation() {
  const ScalarExpr m0 = symbolic::param("m0");
  double worst = 0.0;
  bool ok = true;
  for (const ForceField& f : {ForceField::constant_force(symbolic::param("F")), linear_phi(), magnetic()}) {
    const auto rep = generators::verify_force_equation(m0, f, probe());
    ok = ok && rep.all_pass() && rep.asserted() == 3;
    for (const auto& r : rep.relations) worst = std::max(worst, r.max_residual);
  }
  return {ok && worst <= 1e-9, fmt("3 fields x 3 components, max residual %.2e", worst)};
}

Outcome euler_lagrange() {
  const ScalarExpr m0 = symbolic::param("m0");
  double matched = 0.0;
  for (const ForceField& f : {ForceField{}, linear_phi(), magnetic()}) {
    const auto phi = generators::apply_euler_lagrange(generators::build_lagrangian_structure(m0, f).lagrangian,
                                                      generators::build_interacting_liouvillian(m0, f));
    for (const auto& c : phi) matched = std::max(matched, algebra::op_equal(c, OperatorExpr(), probe()).max_residual);
  }
  const auto bad = generators::apply_euler_lagrange(generators::build_lagrangian_structure(m0, {}).lagrangian,
                                                    generators::build_interacting_liouvillian(m0, magnetic()));
  double control = 0.0;
  for (const auto& c : bad) control = std::max(control, algebra::op_equal(c, OperatorExpr(), probe()).max_residual);
  return {matched <= 1e-9 && control > 1e-3,
          fmt("matched max residual %.2e, mismatched control %.3f", matched, control)};
}

Outcome constant_force_trajectory() {
  const auto t0 = std::chrono::steady_clock::now();
  const double m0 = 1.0, F = 1.0;
  const auto rec = flow::integrate_trajectory(m0, flow::ForceFieldNum::uniform({F, 0, 0}), {0, 0, 0}, {0, 0, 0}, 5.0, 1e-3);
  double ev = 0.0, ex = 0.0, vmax = 0.0;
  for (std::size_t k = 0; k < rec.t.size(); ++k) {
    const double a = F * rec.t[k] / m0;
    const double v = a / std::sqrt(1.0 + a * a);
    const double x = m0 / F * (std::sqrt(1.0 + a * a) - 1.0);
    ev = std::max(ev, std::abs(rec.v[k][0] - v));
    ex = std::max(ex, std::abs(rec.r[k][0] - x));
    vmax = std::max(vmax, std::abs(rec.v[k][0]));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {rec.t.size() == 5001 && ev <= 1e-8 && ex <= 1e-7 && vmax < 1.0 && secs <= 5.0,
          fmt("|dv| %.2e, |dx| %.2e, max |v| %.6f", ev, ex, vmax) + fmt(", %.3f s", secs)};
}

Outcome series_c1_c2() {
  // Π (2k-1)/(2k) for k = 1..n
  const std::vector<std::string> frozen{"1/2", "3/8", "5/16", "35/128", "63/256", "231/1024"};
  std::string out;
  const int code = cli({"series-check", "--identity", "c1-momentum", "--order", "6", "--format", "machine"}, out);
  const auto doc = nlohmann::json::parse(out);
  bool coeffs = doc["metrics"]["coefficients"] == nlohmann::json(frozen);
  double worst = 0.0;
  for (const auto& c : doc["checks"])
    if (!c["informational"].get<bool>()) worst = std::max(worst, c["residual"].get<double>());
  const auto lam = series::verify_c1_on_lambda(symbolic::param("m0"), 6, probe());
  const auto c2 = series::verify_c2(magnetic(), probe());
  for (const auto& r : lam.relations)
    if (!r.informational) worst = std::max(worst, r.max_residual);
  for (const auto& r : c2.relations)
    if (!r.informational) worst = std::max(worst, r.max_residual);
  return {code == 0 && coeffs && lam.all_pass() && c2.all_pass() && worst <= 1e-9,
          std::string(coeffs ? "coefficients 1/2 3/8 5/16 35/128 63/256 231/1024" : "coefficients differ") +
              fmt(", C2 %.0f relations, max residual %.2e", c2.asserted(), worst)};
}

Outcome boost_closed_forms() {
  double worst = 0.0;
  bool ok = true;
  for (auto kind : {series::BoostKind::Velocity, series::BoostKind::EnergyMomentum}) {
    const auto rep = series::verify_boost_closed_forms(kind, 0.3, 4, probe(1e-8));
    ok = ok && rep.all_pass();
    for (const auto& r : rep.relations)
      if (!r.informational) worst = std::max(worst, r.max_residual);
  }
  const auto pos = series::verify_boost_closed_forms(series::BoostKind::Position, 0.3, 2, probe(1e-8));
  ok = ok && pos.all_pass();
  for (const auto& r : pos.relations)
    if (!r.informational) worst = std::max(worst, r.max_residual);
  return {ok && worst <= 1e-8, fmt("velocity and 4-vector through s^4, position through s^2, max residual %.2e", worst)};
}

Outcome kvn_evolution() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto axes = flow::default_axes(kVel);
  const double cx = -1.0, cv = 0.3, wx = 0.8, wv = 0.1, T = 2.0;
  const auto g = flow::gaussian_state(kVel, axes, {cx, cv}, {wx, wv});
  flow::TransportDiagnostics d;
  const auto out = flow::evolve_state(g, 1.0, flow::ForceFieldNum(), T, 0.05, &d);
  auto exact = g;
  const double scale = g.amplitudes()[0].real() / (bump(axes[0].min, cx, wx) * bump(axes[1].min, cv, wv));
  for (std::size_t k = 0; k < exact.size(); ++k) {
    const auto z = exact.point(k);
    exact.amplitudes()[k] = scale * bump(z[0] - z[3] * T, cx, wx) * bump(z[3], cv, wv);
  }
  const double l2 = flow::l2_distance(out, exact);
  const double drift = std::abs(d.norm_after - d.norm_before) / T;

  const auto e = flow::gaussian_state(kVel, axes, {-0.5, 0.25}, {0.8, 0.1});
  const double te = 1.0, h = 0.01;
  const double xm = flow::expectation(flow::evolve_state(e, 1.0, {}, te - h, 0.05), algebra::X(1)).real();
  const double xp = flow::expectation(flow::evolve_state(e, 1.0, {}, te + h, 0.05), algebra::X(1)).real();
  const double vv = flow::expectation(flow::evolve_state(e, 1.0, {}, te, 0.05), algebra::V(1)).real();
  const double ehrenfest = std::abs((xp - xm) / (2 * h) - vv);

  const auto c = flow::gaussian_state(kVel, axes, {0.0, 0.0}, {0.3, 0.05});
  const auto field = flow::ForceFieldNum::uniform({1.0, 0, 0});
  double peak = 0.0;
  for (double t : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0}) {
    const auto p = flow::density_peak(flow::evolve_state(c, 1.0, field, t, 0.05));
    const double a = t, x = std::sqrt(1 + a * a) - 1, v = a / std::sqrt(1 + a * a);
    peak = std::max({peak, cells(p[0], x, axes[0]), cells(p[1], v, axes[1])});
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {l2 <= 1e-3 && drift <= 1e-6 && ehrenfest <= 1e-4 && peak <= 2.0 && secs <= 120.0,
          fmt("L2 %.2e, drift/T %.2e, Ehrenfest %.2e", l2, drift, ehrenfest) +
              fmt(", peak %.2f cells, %.1f s", peak, secs)};
}

Outcome boost_group_law() {
  const std::vector<GridAxis> axes{{"x3", -5, 5, 256}, {"v3", -0.999, 0.999, 511}};
  const auto g = flow::gaussian_state(kVel, axes, {0.5, 0.1}, {0.5, 0.05});
  const auto twice = flow::boost_state(flow::boost_state(g, 3, 0.2), 3, 0.2);
  const auto once = flow::boost_state(g, 3, 0.4);
  const auto a = flow::centroid(twice), b = flow::centroid(once);
  const double dc = std::max(cells(a[0], b[0], axes[0]), cells(a[1], b[1], axes[1]));
  return {dc <= 2.0, fmt("centroid discrepancy %.3f cells, L2 %.2e", dc, flow::l2_distance(twice, once))};
}

Outcome pure_state_limit() {
  const auto field = flow::ForceFieldNum::compile(linear_phi());
  const std::vector<GridAxis> axes{{"x1", -6, 6, 512}, {"p1", -4, 4, 511}};
  const auto rep = flow::pure_state_limit_check(1.0, field, {0, 0, 0}, {0.5, 0, 0}, {0.4, 0.2, 0.1, 0.05}, 2.0, axes, 0.05);
  std::string errs = "errors";
  double worst_ratio = 0.0;
  for (std::size_t k = 0; k < rep.rows.size(); ++k) {
    errs += fmt(" %.2e", rep.rows[k].error);
    if (k > 0) worst_ratio = std::max(worst_ratio, rep.rows[k].error / rep.rows[k - 1].error);
  }
  return {rep.monotone && worst_ratio < 1.0, errs + fmt(", worst ratio %.3f", worst_ratio)};
}

Outcome negative_controls() {
  const std::string scenario = write_temp("free.json", R"({"name": "free", "seed": 0})");
  std::string out;
  const int code = cli({"verify-algebra", "--scenario", scenario, "--mutate", "K", "--format", "machine"}, out);
  const auto doc = nlohmann::json::parse(out);
  int wrong = 0, failed = 0, closure_sets = 0;
  std::set<std::string> sets;
  for (const auto& c : doc["checks"]) {
    if (c["informational"].get<bool>()) continue;
    const std::string id = c["id"];
    const bool pass = c["pass"];
    if (id.rfind("closure/", 0) == 0) {
      const auto cut = id.rfind('/');
      sets.insert(id.substr(0, cut));
      const bool involves_k = id.substr(cut).find('K') != std::string::npos;
      wrong += pass == involves_k ? 1 : 0;
    } else {
      wrong += pass ? 0 : 1;
    }
    failed += pass ? 0 : 1;
  }
  closure_sets = static_cast<int>(sets.size());

  ForceField f;
  f.phi = symbolic::x(1) + symbolic::x(2) * symbolic::x(3);
  const ScalarExpr m0 = symbolic::param("m0");
  const auto la = algebra::op_equal(generators::momentum_liouvillian_printed(m0, f),
                                    generators::momentum_liouvillian_electric(m0, f), probe());
  return {code == 1 && wrong == 0 && failed == 24 * closure_sets && la.max_residual <= 1e-9,
          std::to_string(failed) + " failures, all K relations over " + std::to_string(closure_sets) +
              " closure sets" + fmt("; LA -> LA2 residual %.2e", la.max_residual)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"Poincare closure, free velocity representation", [] { return closure(false); }},
      {"Poincare closure, free momentum representation", [] { return closure(true); }},
      {"force equation", force_equation},
      {"Euler-Lagrange", euler_lagrange},
      {"constant-force trajectory", constant_force_trajectory},
      {"C1/C2 series", series_c1_c2},
      {"boost closed forms", boost_closed_forms},
      {"KvN evolution", kvn_evolution},
      {"boost group law on states", boost_group_law},
      {"pure-state limit", pure_state_limit},
      {"negative controls", negative_controls},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
