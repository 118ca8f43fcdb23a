#include "relkvn_cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "relkvn/error.hpp"
#include "relkvn/parse.hpp"
#include "relkvn/series.hpp"
#include "relkvn/state_io.hpp"

namespace relkvn::cli {

namespace {

namespace fs = std::filesystem;
using algebra::OperatorExpr;
using algebra::Representation;
using flow::PhaseSpaceState;
using flow::Vec3d;
using generators::ForceField;
using symbolic::ScalarExpr;

symbolic::ProbeOptions probe_options(const Scenario& s, double tol) {
  symbolic::ProbeOptions o;
  o.trials = s.trials;
  o.tol = tol;
  o.seed = s.seed;
  o.fixed = s.bindings();
  return o;
}

std::string short_number(double d) {
  std::ostringstream os;
  os << d;
  return os.str();
}

RunReport start(const std::string& command, const Scenario& s) {
  RunReport r;
  r.command = command;
  r.config = to_json(s);
  return r;
}

void add_check(RunReport& r, std::string id, double residual, double tol, bool pass, std::string detail = {},
               bool informational = false) {
  CheckResult c;
  c.id = std::move(id);
  c.residual = residual;
  c.tolerance = tol;
  c.pass = pass;
  c.informational = informational;
  c.detail = std::move(detail);
  r.checks.push_back(std::move(c));
}

std::string prepare_output(const Scenario& s) {
  if (s.output.dir.empty()) return {};
  fs::create_directories(s.output.dir);
  return s.output.dir;
}

PhaseSpaceState initial_state(const Scenario& s, const char* command) {
  if (!s.state) throw ConfigError(std::string(command) + " needs a state in the scenario");
  const StateSpec& st = *s.state;
  if (!st.snapshot.empty()) return flow::read_snapshot(st.snapshot);
  return flow::gaussian_state(st.representation, st.axes, st.centre, st.width);
}

// Splits a state coordinate vector (one entry per axis) into r and w triples.
void split(const PhaseSpaceState& psi, const std::vector<double>& coords, Vec3d& r, Vec3d& w) {
  r = {0.0, 0.0, 0.0};
  w = {0.0, 0.0, 0.0};
  for (std::size_t a = 0; a < coords.size(); ++a) {
    const int slot = psi.slot(a);
    (slot < 3 ? r[slot] : w[slot - 3]) = coords[a];
  }
}

// Largest per-axis distance in grid steps.
double cells_apart(const PhaseSpaceState& psi, const std::vector<double>& a, const Vec3d& r, const Vec3d& w) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const int slot = psi.slot(k);
    const double target = slot < 3 ? r[slot] : w[slot - 3];
    worst = std::max(worst, std::abs(a[k] - target) / psi.axes()[k].step());
  }
  return worst;
}

json vec_json(const Vec3d& v) { return json::array({v[0], v[1], v[2]}); }

}  // namespace

RunReport cmd_verify_algebra(const Scenario& s) {
  RunReport r = start("verify-algebra", s);
  const ForceField field = s.field();
  const ScalarExpr m0 = symbolic::param("m0");
  const double tol = s.tolerances.algebra;
  const auto opts = probe_options(s, tol);
  const bool free = field.is_free();
  const auto scope = free ? generators::ClosureScope::All : generators::ClosureScope::WithoutLiouvillian;

  json closure = json::object();
  for (double t : s.probe_times) {
    const ScalarExpr tt = ScalarExpr::constant(t);
    const auto vel = free ? generators::build_free_generators(m0, tt) : generators::build_interacting_generators(m0, field, tt);
    const auto mom = free ? generators::build_momentum_generators(m0, tt)
                          : generators::build_momentum_generators(m0, field, tt);
    for (const auto& [name, gen] : {std::pair{"velocity", vel}, std::pair{"momentum", mom}}) {
      const std::string prefix = std::string("closure/") + name + "/t=" + short_number(t);
      const VerificationReport rep = generators::verify_poincare_closure(generators::mutate(gen, s.mutate), opts, scope);
      r.absorb(prefix, rep, tol);
      closure[prefix] = std::to_string(rep.passed()) + "/" + std::to_string(rep.asserted());
    }
  }
  r.metrics["closure"] = closure;

  r.absorb("force-equation", generators::verify_force_equation(m0, field, opts), tol);

  const OperatorExpr L = generators::build_interacting_liouvillian(m0, field);
  const auto matched = generators::apply_euler_lagrange(generators::build_lagrangian_structure(m0, field).lagrangian, L);
  for (int a = 0; a < 3; ++a) {
    const auto e = algebra::op_equal(matched[a], OperatorExpr(), opts);
    add_check(r, "euler-lagrange/matched/" + std::to_string(a + 1), e.max_residual, tol, e.equal, "Phi = 0");
  }
  if (!free) {
    const auto mismatched =
        generators::apply_euler_lagrange(generators::build_lagrangian_structure(m0, ForceField{}).lagrangian, L);
    double worst = 0.0;
    for (const auto& c : mismatched) worst = std::max(worst, algebra::op_equal(c, OperatorExpr(), opts).max_residual);
    add_check(r, "euler-lagrange/mismatched", worst, tol, worst > tol, "free Lagrangian with the field Liouvillian: Phi != 0");
  }

  r.absorb("canonical-momentum", generators::verify_canonical_momentum(m0, field, opts), tol);

  const OperatorExpr Lp = field.has_vector_potential() ? generators::momentum_liouvillian_transported(m0, field)
                                                        : generators::build_momentum_generators(m0, field).L;
  const auto h = generators::poisson_correspondence(Lp, opts);
  if (!h) {
    add_check(r, "poisson/generating-function", 1.0, tol, false, "momentum Liouvillian has no generating function");
  } else {
    const ScalarExpr expected = generators::momentum_energy(m0, field) + field.phi;
    for (int k = 1; k <= 3; ++k) {
      for (const std::string& var : {"p" + std::to_string(k), "x" + std::to_string(k)}) {
        const auto e = symbolic::equal_numeric(symbolic::diff(*h, var), symbolic::diff(expected, var), opts);
        add_check(r, "poisson/dH/d" + var, e.max_residual, tol, e.equal, "H = sqrt((p-A)^2 + m0^2) + phi");
      }
    }
  }

  ForceField electric = field;
  electric.A = {0, 0, 0};
  const auto la = algebra::op_equal(generators::momentum_liouvillian_printed(m0, electric),
                                    generators::momentum_liouvillian_electric(m0, electric), opts);
  add_check(r, "la-reduction", la.max_residual, tol, la.equal, "general-A momentum Liouvillian at A = 0");
  return r;
}

RunReport cmd_evolve(const Scenario& s) {
  RunReport r = start("evolve", s);
  const PhaseSpaceState psi0 = initial_state(s, "evolve");
  const auto field = flow::ForceFieldNum::compile(s.field(), s.bindings());
  const double t0 = psi0.time();
  if (s.t_end < t0) throw ConfigError("integrator.t_end precedes the state time " + short_number(t0));
  const double span = s.t_end - t0;
  const bool velocity = psi0.representation() == Representation::Velocity;
  const std::string dir = prepare_output(s);

  const int segments = span > 0.0 ? s.output.snapshots : 0;
  std::ostringstream csv;
  csv << "t";
  for (const auto& a : psi0.axes()) csv << ',' << a.variable;
  csv << ",norm\n" << std::setprecision(12);
  auto record = [&](const PhaseSpaceState& psi, int k) {
    csv << psi.time();
    for (double c : flow::centroid(psi)) csv << ',' << c;
    csv << ',' << psi.norm() << '\n';
    if (!dir.empty()) {
      std::ostringstream name;
      name << "snapshot_" << std::setw(3) << std::setfill('0') << k << ".kvn";
      const std::string path = (fs::path(dir) / name.str()).string();
      flow::write_snapshot(psi, path, s.output.encoding);
      r.artifacts.push_back(path);
    }
  };

  // Peak oracle: the trajectory through the initial density maximum (uniform fields only).
  const bool track_peak = field.is_uniform();
  Vec3d r0, w0, v0;
  split(psi0, flow::density_peak(psi0), r0, w0);
  v0 = w0;
  if (!velocity) {
    const auto pot = field.potentials(r0, t0);
    double q2 = 0.0;
    for (int i = 0; i < 3; ++i) q2 += (w0[i] - pot.A[i]) * (w0[i] - pot.A[i]);
    for (int i = 0; i < 3; ++i) v0[i] = (w0[i] - pot.A[i]) / std::sqrt(q2 + s.m0 * s.m0);
  }
  const double h_traj = std::min(s.dt, 1e-3);
  double peak_cells = 0.0;

  record(psi0, 0);
  PhaseSpaceState psi = psi0;
  flow::TransportDiagnostics total;
  total.norm_before = psi0.norm();
  for (int k = 1; k <= segments; ++k) {
    const double tk = k == segments ? s.t_end : t0 + span * k / segments;
    flow::TransportDiagnostics d;
    psi = flow::evolve_state(psi, s.m0, field, tk, s.dt, &d);
    total.exited_nodes += d.exited_nodes;
    total.steps += d.steps;
    if (!d.warning.empty()) total.warning = d.warning;
    record(psi, k);
    if (track_peak) {
      const auto traj = flow::integrate_trajectory(s.m0, field, r0, v0, tk - t0, h_traj, 1 << 30);
      peak_cells = std::max(peak_cells, cells_apart(psi, flow::density_peak(psi), traj.r.back(),
                                                    velocity ? traj.v.back() : traj.p.back()));
    }
  }
  total.norm_after = psi.norm();
  total.mass_loss = std::max(0.0, 1.0 - total.norm_after / total.norm_before);

  const double drift = std::abs(total.norm_after - total.norm_before);
  const double drift_rate = span > 0.0 ? drift / span : drift;
  add_check(r, "norm-drift", drift_rate, s.tolerances.norm_drift, drift_rate <= s.tolerances.norm_drift,
            "|N(T) - N(0)| per unit time");
  {
    std::string detail = std::to_string(total.exited_nodes) + " characteristics left the grid";
    if (!total.warning.empty()) detail += " (warning raised)";
    add_check(r, "mass-loss", total.mass_loss, 0.0, true, detail, true);
  }

  if (span == 0.0) {
    const double d = flow::l2_distance(psi, psi0);
    add_check(r, "zero-step", d, 0.0, d == 0.0, "output state equals input");
  }

  const auto c0 = flow::centroid(psi0);
  const auto c1 = flow::centroid(psi);
  if (span > 0.0 && velocity && s.field().is_free()) {
    for (int i = 0; i < 3; ++i) {
      const int ax = psi0.axis_of_slot(i), av = psi0.axis_of_slot(3 + i);
      if (ax < 0 || av < 0) continue;
      const double expected = c0[ax] + span * c0[av];
      const double res = std::abs(c1[ax] - expected);
      add_check(r, "free-shift/x" + std::to_string(i + 1), res, s.tolerances.shift, res <= s.tolerances.shift,
                "<X>(T) = <X>(0) + T <V>(0)");
    }
  }
  if (track_peak && span > 0.0) {
    add_check(r, "peak-trajectory", peak_cells, s.tolerances.peak_cells, peak_cells <= s.tolerances.peak_cells,
              "density peak vs trajectory from the initial peak, in grid cells");
    if (!dir.empty()) {
      const long steps = static_cast<long>(std::ceil(span / h_traj - 1e-9));
      const auto traj = flow::integrate_trajectory(s.m0, field, r0, v0, span, h_traj,
                                                   static_cast<int>(std::max(1L, steps / 1000)));
      const std::string path = (fs::path(dir) / "trajectory.csv").string();
      flow::write_trajectory_csv(traj, path, !velocity);
      r.artifacts.push_back(path);
    }
  }

  if (!dir.empty()) {
    const std::string path = (fs::path(dir) / "expectations.csv").string();
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path + " for writing");
    os << csv.str();
    r.artifacts.push_back(path);
  }

  r.metrics["norm_before"] = total.norm_before;
  r.metrics["norm_after"] = total.norm_after;
  r.metrics["norm_drift"] = drift;
  r.metrics["mass_loss"] = total.mass_loss;
  r.metrics["exited_nodes"] = total.exited_nodes;
  r.metrics["steps"] = total.steps;
  r.metrics["centroid_initial"] = c0;
  r.metrics["centroid_final"] = c1;
  r.metrics["expectations_csv"] = csv.str();
  return r;
}

RunReport cmd_series_check(const Scenario& s) {
  RunReport r = start("series-check", s);
  const std::string& id = s.identity;
  if (id.empty()) throw ConfigError("series-check needs an identity (--identity or series.identity)");
  if (s.order < 1) throw ConfigError("series order must be at least 1");
  const ScalarExpr m0 = symbolic::param("m0");
  const bool boost = id.rfind("boost-", 0) == 0;
  const double tol = boost ? s.tolerances.boost : s.tolerances.series;
  const auto opts = probe_options(s, tol);

  VerificationReport rep;
  if (id == "c1-momentum" || id == "c1-lambda") {
    rep = id == "c1-momentum" ? series::verify_c1_on_velocity(m0, s.order, opts)
                              : series::verify_c1_on_lambda(m0, s.order, opts);
    json coeffs = json::array();
    for (int n = 1; n <= s.order; ++n) coeffs.push_back(series::velocity_series_coefficient(n).str());
    r.metrics["coefficients"] = coeffs;
  } else if (id == "c2") {
    ForceField field = s.field();
    if (!field.has_vector_potential()) field.A = {-symbolic::x(2) * symbolic::param("B0"), 0, 0};
    r.metrics["c2_field_A"] = {field.A[0].str(), field.A[1].str(), field.A[2].str()};
    rep = series::verify_c2(field, opts);
  } else if (id == "boost-velocity") {
    rep = series::verify_boost_closed_forms(series::BoostKind::Velocity, s.rapidity, s.order, opts);
  } else if (id == "boost-4vector") {
    rep = series::verify_boost_closed_forms(series::BoostKind::EnergyMomentum, s.rapidity, s.order, opts);
  } else if (id == "boost-position") {
    rep = series::verify_boost_closed_forms(series::BoostKind::Position, s.rapidity, s.order, opts);
  } else {
    throw UnknownIdentity("unknown identity '" + id +
                          "' (expected c1-momentum, c1-lambda, c2, boost-velocity, boost-4vector or boost-position)");
  }
  r.absorb(id, rep, tol);
  return r;
}

RunReport cmd_boost(const Scenario& s) {
  RunReport r = start("boost", s);
  const PhaseSpaceState psi0 = initial_state(s, "boost");
  if (psi0.representation() != Representation::Velocity) {
    throw RepresentationMismatch("boost needs a velocity-representation state");
  }
  if (psi0.time() != 0.0) throw ConfigError("boost needs a state at t = 0");
  for (const auto& b : s.boosts) {
    if (psi0.axis_of_slot(2 + b.axis) < 0) {
      throw ConfigError("a boost along axis " + std::to_string(b.axis) + " needs a v" + std::to_string(b.axis) +
                        " grid axis");
    }
    if (std::abs(std::tanh(b.rapidity)) > 0.9) throw ConfigError("boost rapidity needs |tanh s| <= 0.9");
  }
  const std::string dir = prepare_output(s);

  Vec3d r0, v0;
  split(psi0, flow::density_peak(psi0), r0, v0);
  Vec3d expected = v0;
  PhaseSpaceState psi = psi0;
  std::size_t exited = 0;
  bool identity = true;
  for (const auto& b : s.boosts) {
    flow::TransportDiagnostics d;
    psi = flow::boost_state(psi, b.axis, b.rapidity, 1e-2, &d);
    exited += d.exited_nodes;
    expected = flow::boosted_velocity(expected, b.axis, b.rapidity);
    identity = identity && b.rapidity == 0.0;
  }

  Vec3d r1, v1;
  const auto peak = flow::density_peak(psi);
  split(psi, peak, r1, v1);
  double worst = 0.0;
  for (std::size_t k = 0; k < peak.size(); ++k) {
    const int slot = psi.slot(k);
    if (slot >= 3) worst = std::max(worst, std::abs(peak[k] - expected[slot - 3]) / psi.axes()[k].step());
  }
  add_check(r, "peak-velocity", worst, s.tolerances.peak_cells, worst <= s.tolerances.peak_cells,
            "density peak vs velocity addition, in grid cells");
  if (identity) {
    const double d = flow::l2_distance(psi, psi0);
    add_check(r, "identity", d, 0.0, d == 0.0, "zero rapidity leaves the state unchanged");
  }
  const double loss = std::max(0.0, 1.0 - psi.norm() / psi0.norm());
  add_check(r, "mass-loss", loss, 0.0, true, std::to_string(exited) + " characteristics left the grid", true);

  if (!dir.empty()) {
    const std::string path = (fs::path(dir) / "boosted.kvn").string();
    flow::write_snapshot(psi, path, s.output.encoding);
    r.artifacts.push_back(path);
  }
  r.metrics["peak_initial"] = vec_json(v0);
  r.metrics["peak_final"] = vec_json(v1);
  r.metrics["peak_expected"] = vec_json(expected);
  r.metrics["centroid_final"] = flow::centroid(psi);
  return r;
}

RunReport cmd_operator(const Scenario& s, const std::string& text, const std::string& representation) {
  RunReport r = start("op", s);
  const ScalarExpr m0 = symbolic::param("m0");
  generators::GeneratorSet gen;
  if (representation == "velocity") {
    gen = generators::build_free_generators(m0);
  } else if (representation == "momentum") {
    gen = generators::build_momentum_generators(m0);
  } else {
    throw ConfigError("representation must be 'velocity' or 'momentum'");
  }
  std::map<std::string, OperatorExpr> names;
  for (auto& [name, op] : gen.generators()) names[name] = op;
  const OperatorExpr op = algebra::parse_operator(text, names);
  r.metrics["input"] = text;
  r.metrics["normal_form"] = op.str();
  r.metrics["hermitian"] = algebra::is_hermitian(op, probe_options(s, s.tolerances.algebra));
  return r;
}

RunReport run_command(const std::string& command, const Scenario& s) {
  const auto start_time = std::chrono::steady_clock::now();
  RunReport r;
  if (command == "verify-algebra") {
    r = cmd_verify_algebra(s);
  } else if (command == "evolve") {
    r = cmd_evolve(s);
  } else if (command == "series-check") {
    r = cmd_series_check(s);
  } else if (command == "boost") {
    r = cmd_boost(s);
  } else {
    throw ConfigError("cannot run command '" + command + "'");
  }
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
  return r;
}

}  // namespace relkvn::cli
