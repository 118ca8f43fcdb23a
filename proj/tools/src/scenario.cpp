#include "relkvn_cli/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "relkvn/error.hpp"
#include "relkvn/parse.hpp"

namespace relkvn::cli {

namespace {

namespace fs = std::filesystem;

// Object view that remembers which keys were read.
class Fields {
 public:
  Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(where() + " must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key);
  }
  const json& at(const std::string& key) {
    seen_.insert(key);
    return obj_.at(key);
  }
  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_number()) throw ConfigError(sub(key) + " must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(sub(key) + " must be finite");
    return d;
  }
  long integer(const std::string& key, long fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_number_integer()) throw ConfigError(sub(key) + " must be an integer");
    return v.get<long>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_string()) throw ConfigError(sub(key) + " must be a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const std::string& key) {
    std::vector<double> out;
    if (!has(key)) return out;
    const json& v = obj_.at(key);
    if (!v.is_array()) throw ConfigError(sub(key) + " must be an array of numbers");
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(sub(key) + " must be an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  // Throws on any key that was never asked for.
  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError("unknown key '" + sub(it.key()) + "'");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "scenario" : path_; }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string checked_expression(const std::string& text, const std::string& where) {
  try {
    (void)symbolic::parse_scalar(text);
  } catch (const ParseError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return text;
}

algebra::Representation representation_from(const std::string& name, const std::string& where) {
  if (name == "velocity") return algebra::Representation::Velocity;
  if (name == "momentum") return algebra::Representation::Momentum;
  throw ConfigError(where + " must be 'velocity' or 'momentum'");
}

StateSpec read_state(const json& doc, const std::string& base_dir) {
  Fields f(doc, "state");
  StateSpec s;
  s.representation = representation_from(f.string("representation", "velocity"), f.sub("representation"));
  const long dims = f.integer("dims", 1);
  if (dims < 1 || dims > 3) throw ConfigError("state.dims must be 1, 2 or 3");
  if (f.has("axes")) {
    const json& axes = f.at("axes");
    if (!axes.is_array() || axes.empty()) throw ConfigError("state.axes must be a non-empty array");
    for (std::size_t k = 0; k < axes.size(); ++k) {
      Fields a(axes[k], "state.axes[" + std::to_string(k) + "]");
      flow::GridAxis ax;
      if (!a.has("variable") || !a.has("min") || !a.has("max") || !a.has("points")) {
        throw ConfigError(a.sub("") + " needs variable, min, max and points");
      }
      ax.variable = a.string("variable", "");
      ax.min = a.number("min", 0.0);
      ax.max = a.number("max", 0.0);
      const long points = a.integer("points", 0);
      if (points < 1 || points > (1L << 28)) throw ConfigError(a.sub("points") + " out of range");
      ax.points = static_cast<int>(points);
      a.finish();
      s.axes.push_back(ax);
    }
  } else {
    s.axes = flow::default_axes(s.representation, static_cast<int>(dims));
  }
  s.centre = f.numbers("centre");
  s.width = f.numbers("width");
  s.snapshot = f.string("snapshot", "");
  f.finish();

  if (!s.snapshot.empty()) {
    fs::path p(s.snapshot);
    if (p.is_relative()) p = fs::path(base_dir) / p;
    s.snapshot = fs::weakly_canonical(p).string();
    if (!fs::exists(s.snapshot)) throw ConfigError("state.snapshot '" + s.snapshot + "' does not exist");
    return s;
  }
  // Validates axis names, ranges and representation before any work is done.
  (void)flow::PhaseSpaceState(s.representation, s.axes, 0.0);
  if (s.centre.size() != s.axes.size() || s.width.size() != s.axes.size()) {
    throw ConfigError("state.centre and state.width need one entry per axis (" + std::to_string(s.axes.size()) + ")");
  }
  for (double w : s.width)
    if (!(w > 0.0)) throw ConfigError("state.width entries must be positive");
  return s;
}

}  // namespace

generators::ForceField Scenario::field() const {
  generators::ForceField f;
  f.phi = symbolic::parse_scalar(phi);
  for (int i = 0; i < 3; ++i) f.A[i] = symbolic::parse_scalar(A[i]);
  return f;
}

std::map<std::string, double> Scenario::bindings() const {
  auto b = parameters;
  b["m0"] = m0;
  return b;
}

Scenario scenario_from_json(const json& doc, const std::string& base_dir) {
  Fields f(doc, "");
  Scenario s;
  s.name = f.string("name", s.name);
  s.m0 = f.number("m0", s.m0);
  if (!(s.m0 > 0.0)) throw ConfigError("m0 must be positive");

  if (f.has("parameters")) {
    const json& p = f.at("parameters");
    if (!p.is_object()) throw ConfigError("parameters must be an object");
    for (auto it = p.begin(); it != p.end(); ++it) {
      if (!it.value().is_number()) throw ConfigError("parameters." + it.key() + " must be a number");
      if (it.key() == "m0") throw ConfigError("parameters.m0: set m0 at the top level");
      s.parameters[it.key()] = it.value().get<double>();
    }
  }

  if (f.has("field")) {
    Fields g(f.at("field"), "field");
    s.phi = checked_expression(g.string("phi", "0"), "field.phi");
    if (g.has("A")) {
      const json& a = g.at("A");
      if (!a.is_array() || a.size() != 3) throw ConfigError("field.A must be an array of three expressions");
      for (int i = 0; i < 3; ++i) {
        if (!a[i].is_string()) throw ConfigError("field.A entries must be strings");
        s.A[i] = checked_expression(a[i].get<std::string>(), "field.A[" + std::to_string(i) + "]");
      }
    }
    g.finish();
  }

  if (f.has("state")) s.state = read_state(f.at("state"), base_dir);

  if (f.has("integrator")) {
    Fields g(f.at("integrator"), "integrator");
    s.dt = g.number("dt", s.dt);
    s.t_end = g.number("t_end", s.t_end);
    g.finish();
    if (!(s.dt > 0.0)) throw ConfigError("integrator.dt must be positive");
  }

  if (f.has("boosts")) {
    const json& b = f.at("boosts");
    if (!b.is_array()) throw ConfigError("boosts must be an array");
    for (std::size_t k = 0; k < b.size(); ++k) {
      Fields g(b[k], "boosts[" + std::to_string(k) + "]");
      BoostSpec spec;
      spec.axis = static_cast<int>(g.integer("axis", 3));
      if (spec.axis < 1 || spec.axis > 3) throw ConfigError(g.sub("axis") + " must be 1, 2 or 3");
      const bool by_rapidity = g.has("rapidity"), by_velocity = g.has("velocity");
      if (by_rapidity == by_velocity) throw ConfigError(g.sub("") + " needs exactly one of rapidity, velocity");
      if (by_rapidity) {
        spec.rapidity = g.number("rapidity", 0.0);
      } else {
        const double v = g.number("velocity", 0.0);
        if (!(std::abs(v) < 1.0)) throw ConfigError(g.sub("velocity") + " must lie in (-1, 1)");
        spec.rapidity = std::atanh(v);
      }
      g.finish();
      s.boosts.push_back(spec);
    }
  }

  if (f.has("output")) {
    Fields g(f.at("output"), "output");
    s.output.dir = g.string("dir", "");
    const std::string enc = g.string("encoding", "text");
    if (enc == "text") {
      s.output.encoding = flow::SnapshotEncoding::Text;
    } else if (enc == "binary") {
      s.output.encoding = flow::SnapshotEncoding::Binary;
    } else {
      throw ConfigError("output.encoding must be 'text' or 'binary'");
    }
    s.output.snapshots = static_cast<int>(g.integer("snapshots", 1));
    if (s.output.snapshots < 1) throw ConfigError("output.snapshots must be at least 1");
    g.finish();
  }

  const long seed = f.integer("seed", 0);
  if (seed < 0) throw ConfigError("seed must be nonnegative");
  s.seed = static_cast<std::uint64_t>(seed);

  if (f.has("probe")) {
    Fields g(f.at("probe"), "probe");
    s.trials = static_cast<int>(g.integer("trials", s.trials));
    if (s.trials < 1) throw ConfigError("probe.trials must be positive");
    if (g.has("times")) {
      s.probe_times = g.numbers("times");
      if (s.probe_times.empty()) throw ConfigError("probe.times must not be empty");
    }
    g.finish();
  }

  if (f.has("series")) {
    Fields g(f.at("series"), "series");
    s.identity = g.string("identity", "");
    s.order = static_cast<int>(g.integer("order", s.order));
    s.rapidity = g.number("rapidity", s.rapidity);
    g.finish();
  }

  s.mutate = f.string("mutate", "");
  if (!s.mutate.empty() && s.mutate != "K" && s.mutate != "L") throw ConfigError("mutate must be K or L");

  if (f.has("tolerances")) {
    Fields g(f.at("tolerances"), "tolerances");
    Tolerances& t = s.tolerances;
    t.algebra = g.number("algebra", t.algebra);
    t.series = g.number("series", t.series);
    t.boost = g.number("boost", t.boost);
    t.shift = g.number("shift", t.shift);
    t.norm_drift = g.number("norm_drift", t.norm_drift);
    t.peak_cells = g.number("peak_cells", t.peak_cells);
    g.finish();
  }
  f.finish();

  try {
    (void)s.field();
  } catch (const ParseError& e) {
    throw ConfigError(std::string("field: ") + e.what());
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open scenario '" + path + "'");
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError("scenario '" + path + "': " + e.what());
  }
  const fs::path base = fs::path(path).parent_path();
  return scenario_from_json(doc, base.empty() ? "." : base.string());
}

json to_json(const Scenario& s) {
  json doc;
  doc["name"] = s.name;
  doc["m0"] = s.m0;
  doc["parameters"] = s.parameters;
  doc["field"] = {{"phi", s.phi}, {"A", s.A}};
  if (s.state) {
    json st;
    st["representation"] = algebra::to_string(s.state->representation);
    json axes = json::array();
    for (const auto& a : s.state->axes)
      axes.push_back({{"variable", a.variable}, {"min", a.min}, {"max", a.max}, {"points", a.points}});
    st["axes"] = axes;
    if (!s.state->snapshot.empty()) {
      st["snapshot"] = s.state->snapshot;
    } else {
      st["centre"] = s.state->centre;
      st["width"] = s.state->width;
    }
    doc["state"] = st;
  }
  doc["integrator"] = {{"dt", s.dt}, {"t_end", s.t_end}};
  json boosts = json::array();
  for (const auto& b : s.boosts) boosts.push_back({{"axis", b.axis}, {"rapidity", b.rapidity}});
  doc["boosts"] = boosts;
  doc["output"] = {{"dir", s.output.dir},
                   {"encoding", s.output.encoding == flow::SnapshotEncoding::Text ? "text" : "binary"},
                   {"snapshots", s.output.snapshots}};
  doc["seed"] = s.seed;
  doc["probe"] = {{"trials", s.trials}, {"times", s.probe_times}};
  doc["series"] = {{"identity", s.identity}, {"order", s.order}, {"rapidity", s.rapidity}};
  doc["mutate"] = s.mutate;
  const Tolerances& t = s.tolerances;
  doc["tolerances"] = {{"algebra", t.algebra}, {"series", t.series},         {"boost", t.boost},
                       {"shift", t.shift},     {"norm_drift", t.norm_drift}, {"peak_cells", t.peak_cells}};
  return doc;
}

}  // namespace relkvn::cli
