#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "relkvn/error.hpp"
#include "relkvn/evaluate.hpp"
#include "relkvn/phase_flow.hpp"

namespace relkvn::flow {

namespace {

int parse_slot(const std::string& name, Representation rep) {
  if (name.size() != 2 || name[1] < '1' || name[1] > '3') throw ConfigError("bad axis variable '" + name + "'");
  const int k = name[1] - '1';
  switch (name[0]) {
    case 'x':
      return k;
    case 'v':
      if (rep != Representation::Velocity) throw RepresentationMismatch("axis " + name + " in a momentum state");
      return 3 + k;
    case 'p':
      if (rep != Representation::Momentum) throw RepresentationMismatch("axis " + name + " in a velocity state");
      return 3 + k;
    default:
      throw ConfigError("bad axis variable '" + name + "'");
  }
}

std::vector<std::complex<double>> derivative(const PhaseSpaceState& s, const std::vector<std::complex<double>>& f,
                                             std::size_t axis) {
  const std::size_t stride = s.stride(axis);
  const auto n = static_cast<std::size_t>(s.axes()[axis].points);
  const double h = s.axes()[axis].step();
  std::vector<std::complex<double>> out(f.size());
  auto at = [&](std::size_t idx, std::size_t i, long off) -> std::complex<double> {
    const long j = static_cast<long>(i) + off;
    if (j < 0 || j >= static_cast<long>(n)) return 0.0;
    return f[idx + static_cast<std::size_t>(j) * stride - i * stride];
  };
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const std::size_t i = (idx / stride) % n;
    out[idx] = (-at(idx, i, 2) + 8.0 * at(idx, i, 1) - 8.0 * at(idx, i, -1) + at(idx, i, -2)) / (12.0 * h);
  }
  return out;
}

}  // namespace

PhaseSpaceState::PhaseSpaceState(Representation rep, std::vector<GridAxis> axes, double t)
    : rep_(rep), axes_(std::move(axes)), t_(t) {
  if (axes_.empty()) throw ConfigError("a state needs at least one axis");
  std::set<int> seen;
  std::size_t total = 1;
  for (const auto& ax : axes_) {
    const int slot = parse_slot(ax.variable, rep);
    if (!seen.insert(slot).second) throw ConfigError("axis " + ax.variable + " given twice");
    if (ax.points < 4) throw ConfigError("axis " + ax.variable + " needs at least 4 points");
    if (!(ax.max > ax.min)) throw ConfigError("axis " + ax.variable + " has an empty range");
    if (slot >= 3 && rep == Representation::Velocity && !(ax.min > -1.0 && ax.max < 1.0)) {
      throw ConfigError("velocity axis " + ax.variable + " must lie inside (-1, 1)");
    }
    total *= static_cast<std::size_t>(ax.points);
    if (total > (std::size_t{1} << 28)) throw ConfigError("grid too large");
    slots_.push_back(slot);
  }
  strides_.assign(axes_.size(), 1);
  for (std::size_t k = axes_.size() - 1; k > 0; --k) strides_[k - 1] = strides_[k] * axes_[k].points;
  psi_.assign(total, 0.0);
}

int PhaseSpaceState::axis_of_slot(int slot) const {
  for (std::size_t k = 0; k < slots_.size(); ++k)
    if (slots_[k] == slot) return static_cast<int>(k);
  return -1;
}

std::array<double, 6> PhaseSpaceState::point(std::size_t index) const {
  std::array<double, 6> z{};
  for (std::size_t k = 0; k < axes_.size(); ++k) {
    const auto i = static_cast<int>((index / strides_[k]) % axes_[k].points);
    z[slots_[k]] = axes_[k].node(i);
  }
  return z;
}

double PhaseSpaceState::cell_volume() const {
  double dv = 1.0;
  for (const auto& ax : axes_) dv *= ax.step();
  return dv;
}

double PhaseSpaceState::norm() const {
  double acc = 0.0;
  for (const auto& a : psi_) acc += std::norm(a);
  return acc * cell_volume();
}

std::vector<GridAxis> default_axes(Representation rep, int dims) {
  if (dims < 1 || dims > 3) throw ConfigError("dims must be 1, 2 or 3");
  const int nx = dims == 1 ? 512 : dims == 2 ? 24 : 8;
  const int nw = dims == 1 ? 511 : nx;
  std::vector<GridAxis> axes;
  for (int i = 1; i <= dims; ++i) axes.push_back({"x" + std::to_string(i), -10.0, 10.0, nx});
  for (int i = 1; i <= dims; ++i) {
    if (rep == Representation::Velocity) {
      axes.push_back({"v" + std::to_string(i), -0.999, 0.999, nw});
    } else {
      axes.push_back({"p" + std::to_string(i), -4.0, 4.0, nw});
    }
  }
  return axes;
}

PhaseSpaceState gaussian_state(Representation rep, std::vector<GridAxis> axes, const std::vector<double>& centre,
                               const std::vector<double>& width, double t) {
  PhaseSpaceState s(rep, std::move(axes), t);
  const auto& ax = s.axes();
  if (centre.size() != ax.size() || width.size() != ax.size()) {
    throw ConfigError("gaussian centre and width need one entry per axis");
  }
  for (double w : width)
    if (!(w > 0.0)) throw ConfigError("gaussian widths must be positive");
  // per-axis factors, then the outer product
  std::vector<std::vector<double>> factor(ax.size());
  for (std::size_t k = 0; k < ax.size(); ++k) {
    factor[k].resize(ax[k].points);
    for (int i = 0; i < ax[k].points; ++i) {
      const double d = (ax[k].node(i) - centre[k]) / width[k];
      factor[k][i] = std::exp(-0.25 * d * d);
    }
  }
  auto& psi = s.amplitudes();
  for (std::size_t idx = 0; idx < psi.size(); ++idx) {
    double a = 1.0;
    for (std::size_t k = 0; k < ax.size(); ++k) a *= factor[k][(idx / s.stride(k)) % ax[k].points];
    psi[idx] = a;
  }
  const double n = s.norm();
  if (!(n > 0.0)) throw ConfigError("gaussian has no support on the grid");
  const double scale = 1.0 / std::sqrt(n);
  for (auto& a : psi) a *= scale;
  return s;
}

std::vector<double> born_density(const PhaseSpaceState& state) {
  std::vector<double> rho(state.size());
  std::transform(state.amplitudes().begin(), state.amplitudes().end(), rho.begin(),
                 [](const std::complex<double>& a) { return std::norm(a); });
  return rho;
}

std::vector<double> centroid(const PhaseSpaceState& state) {
  const auto& ax = state.axes();
  std::vector<double> m(ax.size(), 0.0);
  double total = 0.0;
  const auto& psi = state.amplitudes();
  for (std::size_t idx = 0; idx < psi.size(); ++idx) {
    const double w = std::norm(psi[idx]);
    if (w == 0.0) continue;
    total += w;
    for (std::size_t k = 0; k < ax.size(); ++k) {
      m[k] += w * ax[k].node(static_cast<int>((idx / state.stride(k)) % ax[k].points));
    }
  }
  if (!(total > 0.0)) throw NonFiniteState("centroid of a zero state");
  for (auto& c : m) c /= total;
  return m;
}

std::vector<double> density_peak(const PhaseSpaceState& state) {
  const auto& psi = state.amplitudes();
  const auto it = std::max_element(psi.begin(), psi.end(), [](const auto& a, const auto& b) {
    return std::norm(a) < std::norm(b);
  });
  const auto idx = static_cast<std::size_t>(it - psi.begin());
  const auto& ax = state.axes();
  std::vector<double> out;
  for (std::size_t k = 0; k < ax.size(); ++k) {
    out.push_back(ax[k].node(static_cast<int>((idx / state.stride(k)) % ax[k].points)));
  }
  return out;
}

double l2_distance(const PhaseSpaceState& a, const PhaseSpaceState& b) {
  if (a.size() != b.size() || a.axes().size() != b.axes().size()) throw ConfigError("states live on different grids");
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += std::norm(a.amplitudes()[k] - b.amplitudes()[k]);
  return std::sqrt(acc * a.cell_volume());
}

std::complex<double> expectation(const PhaseSpaceState& state, const algebra::OperatorExpr& observable,
                                 const std::map<std::string, double>& params) {
  if (observable.representation() != state.representation()) {
    throw RepresentationMismatch(std::string("observable is in the ") + algebra::to_string(observable.representation()) +
                                 " representation, state in the " + algebra::to_string(state.representation()));
  }
  const Representation rep = state.representation();
  std::vector<symbolic::ScalarExpr> coeffs;
  std::vector<std::vector<std::complex<double>>> dpsi;
  for (const auto& [mono, c] : observable.terms()) {
    std::vector<std::complex<double>> f = state.amplitudes();
    bool vanishes = false;
    for (int slot = 0; slot < 6 && !vanishes; ++slot) {
      const int n = mono.at(slot);
      if (n == 0) continue;
      const int axis = state.axis_of_slot(slot);
      if (axis < 0) {
        vanishes = true;  // no dependence on an absent variable
        break;
      }
      for (int k = 0; k < n; ++k) f = derivative(state, f, static_cast<std::size_t>(axis));
    }
    if (vanishes) continue;
    coeffs.push_back(c);
    dpsi.push_back(std::move(f));
  }
  if (coeffs.empty()) return 0.0;

  std::vector<std::string> slots;
  for (int k = 0; k < 6; ++k) slots.push_back(algebra::derivation_symbol(rep, k));
  slots.push_back(symbolic::vars::t);
  std::set<std::string> extra;
  for (const auto& c : coeffs)
    for (const auto& s : c.free_symbols())
      if (!symbolic::vars::is_phase_variable(s)) extra.insert(s);
  for (const auto& s : extra) {
    if (!params.count(s)) throw UnassignedVariable(s);
    slots.push_back(s);
  }
  const symbolic::Tape tape(coeffs, slots);
  symbolic::Tape::Workspace ws;
  std::vector<double> vals(slots.size());
  vals[6] = state.time();
  std::size_t j = 7;
  for (const auto& s : extra) vals[j++] = params.at(s);
  std::vector<std::complex<double>> out(coeffs.size());

  const auto& psi = state.amplitudes();
  std::complex<double> acc = 0.0;
  for (std::size_t idx = 0; idx < psi.size(); ++idx) {
    const auto z = state.point(idx);
    std::copy(z.begin(), z.end(), vals.begin());
    tape.evaluate(vals, ws, out);
    std::complex<double> o = 0.0;
    for (std::size_t m = 0; m < coeffs.size(); ++m) o += out[m] * dpsi[m][idx];
    acc += std::conj(psi[idx]) * o;
  }
  return acc * state.cell_volume();
}

}  // namespace relkvn::flow
