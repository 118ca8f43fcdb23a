#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "relkvn/error.hpp"
#include "relkvn/phase_flow.hpp"

namespace relkvn::flow {

namespace {

using Mask = std::array<bool, 6>;

// Flows fill dz on every slot and return the divergence over the retained ones.

double speed2(const double* z) { return z[3] * z[3] + z[4] * z[4] + z[5] * z[5]; }

class VelocityForceFlow {
 public:
  VelocityForceFlow(double m0, const ForceFieldNum& field, const Mask& mask) : m0_(m0), field_(field) {
    for (int k = 3; k < 6; ++k) retained_v_ += mask[k] ? 1 : 0;
    if (field.is_uniform()) field.fields({}, 0.0, E0_, B0_);
  }

  double rate(const double* z, double tau, double* dz) const {
    const Vec3d r{z[0], z[1], z[2]};
    const Vec3d v{z[3], z[4], z[5]};
    Vec3d E = E0_, B = B0_;
    if (!field_.is_uniform()) field_.fields(r, tau, E, B);
    const Vec3d F{E[0] + v[1] * B[2] - v[2] * B[1], E[1] + v[2] * B[0] - v[0] * B[2],
                  E[2] + v[0] * B[1] - v[1] * B[0]};
    const double g = std::sqrt(1.0 - speed2(z));
    const double vf = v[0] * F[0] + v[1] * F[1] + v[2] * F[2];
    for (int i = 0; i < 3; ++i) {
      dz[i] = v[i];
      dz[3 + i] = g / m0_ * (F[i] - vf * v[i]);
    }
    // v·F = v·E, and ∂_{v_i}(v×B)_i = 0
    return -(retained_v_ + 2) * g * vf / m0_;
  }

  bool admissible(const double* z) const { return speed2(z) < 1.0; }

 private:
  double m0_;
  const ForceFieldNum& field_;
  int retained_v_ = 0;
  Vec3d E0_{}, B0_{};
};

class MomentumFlow {
 public:
  MomentumFlow(double m0, const ForceFieldNum& field, const Mask& mask)
      : m0_(m0), field_(field), mask_(mask), constant_(field.has_constant_derivatives()) {
    if (constant_) pot0_ = field.potential_derivatives({}, 0.0);
  }

  bool admissible(const double*) const { return true; }

  double rate(const double* z, double tau, double* dz) const {
    ForceFieldNum::Potentials local;
    if (!constant_) local = field_.potential_derivatives({z[0], z[1], z[2]}, tau);
    const ForceFieldNum::Potentials& pot = constant_ ? pot0_ : local;
    double u[3];
    double u2 = m0_ * m0_;
    for (int i = 0; i < 3; ++i) {
      u[i] = z[3 + i] - pot.A[i];
      u2 += u[i] * u[i];
    }
    const double ek = std::sqrt(u2);
    double div = 0.0;
    for (int j = 0; j < 3; ++j) {
      double uda = 0.0;  // Σ_i u_i ∂_j A_i
      for (int i = 0; i < 3; ++i) uda += u[i] * pot.dA[j][i];
      dz[j] = u[j] / ek;
      dz[3 + j] = -pot.grad_phi[j] + uda / ek;
      const double cross_term = pot.dA[j][j] / ek - u[j] * uda / (ek * ek * ek);
      if (mask_[j]) div -= cross_term;
      if (mask_[3 + j]) div += cross_term;
    }
    return div;
  }

 private:
  double m0_;
  const ForceFieldNum& field_;
  Mask mask_;
  bool constant_;
  ForceFieldNum::Potentials pot0_;
};

// Vector field of K_a at t = 0: x_a v_k ∂x_k - (δ_aj - v_a v_j) ∂v_j.
class BoostFlow {
 public:
  BoostFlow(int axis, const Mask& mask) : a_(axis), mask_(mask) {}

  double rate(const double* z, double, double* dz) const {
    const double xa = z[a_];
    const double va = z[3 + a_];
    double div = 0.0;
    for (int k = 0; k < 3; ++k) {
      dz[k] = xa * z[3 + k];
      dz[3 + k] = -((k == a_ ? 1.0 : 0.0) - va * z[3 + k]);
      if (mask_[k] && k == a_) div += z[3 + k];
      if (mask_[3 + k]) div += va * (k == a_ ? 2.0 : 1.0);
    }
    return div;
  }

  bool admissible(const double* z) const { return speed2(z) < 1.0; }

 private:
  int a_;
  Mask mask_;
};

class CubicInterpolator {
 public:
  explicit CubicInterpolator(const PhaseSpaceState& s) : s_(s) {}

  // False when z lies outside the grid box.
  bool eval(const double* z, std::complex<double>& out) const {
    const auto& axes = s_.axes();
    const std::size_t d = axes.size();
    std::array<std::array<double, 4>, 6> w{};
    std::array<std::array<std::size_t, 4>, 6> off{};
    for (std::size_t k = 0; k < d; ++k) {
      const auto& ax = axes[k];
      const double u = (z[s_.slot(k)] - ax.min) / ax.step();
      const int n = ax.points;
      if (!(u >= -1e-9 && u <= n - 1 + 1e-9)) return false;
      const int i = std::clamp(static_cast<int>(std::floor(u)), 0, n - 2);
      const double f = u - i;
      w[k] = {-f * (f - 1.0) * (f - 2.0) / 6.0, (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0,
              -(f + 1.0) * f * (f - 2.0) / 2.0, (f + 1.0) * f * (f - 1.0) / 6.0};
      for (int j = 0; j < 4; ++j) off[k][j] = static_cast<std::size_t>(std::clamp(i - 1 + j, 0, n - 1)) * s_.stride(k);
    }
    const auto& psi = s_.amplitudes();
    std::complex<double> acc = 0.0;
    std::array<int, 6> c{};
    for (;;) {
      double weight = 1.0;
      std::size_t idx = 0;
      for (std::size_t k = 0; k < d; ++k) {
        weight *= w[k][c[k]];
        idx += off[k][c[k]];
      }
      acc += weight * psi[idx];
      std::size_t k = d;
      while (k > 0 && ++c[k - 1] == 4) c[--k] = 0;
      if (k == 0) break;
    }
    out = acc;
    return true;
  }

 private:
  const PhaseSpaceState& s_;
};

Mask mask_of(const PhaseSpaceState& s) {
  Mask m{};
  for (std::size_t k = 0; k < s.axes().size(); ++k) m[s.slot(k)] = true;
  return m;
}

bool finite6(const double* z) {
  for (int k = 0; k < 6; ++k)
    if (!std::isfinite(z[k])) return false;
  return true;
}

// Pulls every node of `in` back from tau1 to tau0 and samples the input there.
template <class Flow>
PhaseSpaceState transport(const PhaseSpaceState& in, const Flow& flow, double tau0, double tau1, double h_max,
                          bool half_density, TransportDiagnostics* diag) {
  if (!(h_max > 0.0)) throw std::invalid_argument("step must be positive");
  const Mask mask = mask_of(in);
  const double span = tau1 - tau0;
  const long steps = static_cast<long>(std::ceil(std::abs(span) / h_max - 1e-9));
  TransportDiagnostics local;
  local.norm_before = in.norm();
  local.steps = static_cast<int>(steps);

  PhaseSpaceState out = in;
  if (steps == 0) {
    local.norm_after = local.norm_before;
    if (diag) *diag = local;
    return out;
  }
  const double h = -span / static_cast<double>(steps);  // backwards
  const CubicInterpolator interp(in);
  auto& psi = out.amplitudes();

  auto stage = [&](const double* z, double tau, double* dz) {
    const double div = flow.rate(z, tau, dz);
    for (int k = 0; k < 6; ++k)
      if (!mask[k]) dz[k] = 0.0;
    return div;
  };

  for (std::size_t idx = 0; idx < psi.size(); ++idx) {
    std::array<double, 6> z = in.point(idx);
    double ell = 0.0;
    double tau = tau1;
    for (long n = 0; n < steps; ++n) {
      double k1[6], k2[6], k3[6], k4[6], y[6];
      const double d1 = stage(z.data(), tau, k1);
      for (int k = 0; k < 6; ++k) y[k] = z[k] + 0.5 * h * k1[k];
      const double d2 = stage(y, tau + 0.5 * h, k2);
      for (int k = 0; k < 6; ++k) y[k] = z[k] + 0.5 * h * k2[k];
      const double d3 = stage(y, tau + 0.5 * h, k3);
      for (int k = 0; k < 6; ++k) y[k] = z[k] + h * k3[k];
      const double d4 = stage(y, tau + h, k4);
      for (int k = 0; k < 6; ++k) z[k] += h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
      ell += h / 6.0 * (d1 + 2.0 * d2 + 2.0 * d3 + d4);
      tau = tau1 + (n + 1) * h;
    }
    // NaN from a crossed speed limit propagates to here
    const bool ok = finite6(z.data()) && std::isfinite(ell) && flow.admissible(z.data());
    std::complex<double> value = 0.0;
    if (!ok || !interp.eval(z.data(), value)) {
      ++local.exited_nodes;
      psi[idx] = 0.0;
      continue;
    }
    psi[idx] = half_density ? value * std::exp(0.5 * ell) : value;
    if (!std::isfinite(psi[idx].real()) || !std::isfinite(psi[idx].imag())) {
      throw NonFiniteState("amplitude became non-finite at node " + std::to_string(idx));
    }
  }
  local.norm_after = out.norm();
  if (local.norm_before > 0.0) local.mass_loss = std::max(0.0, 1.0 - local.norm_after / local.norm_before);
  if (local.exited_nodes > 0 && local.mass_loss > 1e-6) {
    std::ostringstream os;
    os << local.exited_nodes << " characteristics left the grid; mass loss " << local.mass_loss;
    local.warning = os.str();
  }
  if (diag) *diag = local;
  return out;
}

}  // namespace

PhaseSpaceState evolve_state(const PhaseSpaceState& state, double m0, const ForceFieldNum& field, double t_end,
                             double dt, TransportDiagnostics* diagnostics) {
  if (!(m0 > 0.0)) throw std::invalid_argument("m0 must be positive");
  const Mask mask = mask_of(state);
  PhaseSpaceState out;
  if (state.representation() == Representation::Velocity) {
    const VelocityForceFlow flow(m0, field, mask);
    out = transport(state, flow, state.time(), t_end, dt, true, diagnostics);
  } else {
    if (!field.has_potentials()) throw ConfigError("momentum evolution needs a field with potentials");
    const MomentumFlow flow(m0, field, mask);
    out = transport(state, flow, state.time(), t_end, dt, true, diagnostics);
  }
  out.set_time(t_end);
  return out;
}

PhaseSpaceState boost_state(const PhaseSpaceState& state, int axis, double s, double ds,
                            TransportDiagnostics* diagnostics) {
  if (state.representation() != Representation::Velocity) {
    throw RepresentationMismatch("boost_state needs a velocity-representation state");
  }
  if (axis < 1 || axis > 3) throw std::invalid_argument("boost axis must be 1, 2 or 3");
  if (state.time() != 0.0) throw std::invalid_argument("boost_state needs t = 0");
  if (std::abs(std::tanh(s)) > 0.9) throw std::invalid_argument("boost rapidity needs |tanh s| <= 0.9");
  const BoostFlow flow(axis - 1, mask_of(state));
  return transport(state, flow, 0.0, s, ds, true, diagnostics);
}

double liouville_field(Representation rep, double m0, const ForceFieldNum& field, const std::array<double, 6>& z,
                       double t, std::array<double, 6>& dz) {
  const Mask all{true, true, true, true, true, true};
  if (rep == Representation::Velocity) return VelocityForceFlow(m0, field, all).rate(z.data(), t, dz.data());
  return MomentumFlow(m0, field, all).rate(z.data(), t, dz.data());
}

double boost_field(int axis, const std::array<double, 6>& z, std::array<double, 6>& dz) {
  if (axis < 1 || axis > 3) throw std::invalid_argument("boost axis must be 1, 2 or 3");
  const Mask all{true, true, true, true, true, true};
  return BoostFlow(axis - 1, all).rate(z.data(), 0.0, dz.data());
}

Vec3d boosted_velocity(const Vec3d& v, int axis, double s) {
  if (axis < 1 || axis > 3) throw std::invalid_argument("boost axis must be 1, 2 or 3");
  const int a = axis - 1;
  const double b = std::tanh(s);
  const double den = 1.0 - b * v[a];
  Vec3d out;
  for (int k = 0; k < 3; ++k) out[k] = k == a ? (v[a] - b) / den : v[k] * std::sqrt(1.0 - b * b) / den;
  return out;
}

PhaseSpaceState to_momentum_representation(const PhaseSpaceState& state, double m0, const ForceFieldNum& field,
                                           const std::vector<GridAxis>& momentum_axes) {
  if (state.representation() != Representation::Velocity) {
    throw RepresentationMismatch("to_momentum_representation needs a velocity state");
  }
  std::vector<GridAxis> axes = state.axes();
  int dims = 0;
  for (auto& ax : axes) {
    if (ax.variable[0] != 'v') continue;
    const std::string want = "p" + ax.variable.substr(1);
    const auto it = std::find_if(momentum_axes.begin(), momentum_axes.end(),
                                 [&](const GridAxis& g) { return g.variable == want; });
    if (it == momentum_axes.end()) throw ConfigError("no momentum axis " + want);
    ax = *it;
    ++dims;
  }
  PhaseSpaceState out(Representation::Momentum, axes, state.time());
  const Mask mask = mask_of(out);
  const CubicInterpolator interp(state);
  auto& psi = out.amplitudes();
  for (std::size_t idx = 0; idx < psi.size(); ++idx) {
    std::array<double, 6> z = out.point(idx);
    const auto pot = field.potential_derivatives({z[0], z[1], z[2]}, state.time());
    double u[3] = {0.0, 0.0, 0.0};
    double ek2 = m0 * m0;
    for (int i = 0; i < 3; ++i) {
      if (!mask[3 + i]) continue;
      u[i] = z[3 + i] - pot.A[i];
      ek2 += u[i] * u[i];
    }
    const double ek = std::sqrt(ek2);
    for (int i = 0; i < 3; ++i) z[3 + i] = u[i] / ek;
    std::complex<double> value = 0.0;
    if (!interp.eval(z.data(), value)) continue;
    // |det ∂v/∂p| = m0² / E^(dims+2)
    psi[idx] = value * std::sqrt(m0 * m0 / std::pow(ek, dims + 2));
  }
  return out;
}

PureStateLimitReport pure_state_limit_check(double m0, const ForceFieldNum& field, const Vec3d& r0, const Vec3d& p0,
                                            std::vector<double> widths, double t_end,
                                            const std::vector<GridAxis>& axes, double dt) {
  if (widths.empty()) throw ConfigError("pure_state_limit_check needs at least one width");
  for (double w : widths)
    if (!(w > 0.0)) throw ConfigError("widths must be positive");
  std::sort(widths.begin(), widths.end(), std::greater<>());
  const PhaseSpaceState probe(Representation::Momentum, axes);

  const auto pot0 = field.potentials(r0, 0.0);
  Vec3d v0;
  double ek2 = m0 * m0;
  for (int i = 0; i < 3; ++i) ek2 += (p0[i] - pot0.A[i]) * (p0[i] - pot0.A[i]);
  for (int i = 0; i < 3; ++i) v0[i] = (p0[i] - pot0.A[i]) / std::sqrt(ek2);
  const TrajectoryRecord traj = integrate_trajectory(m0, field, r0, v0, t_end, std::min(dt, 1e-3), 1 << 30);

  PureStateLimitReport report;
  std::vector<double> centre;
  for (std::size_t k = 0; k < axes.size(); ++k) {
    const int slot = probe.slot(k);
    centre.push_back(slot < 3 ? r0[slot] : p0[slot - 3]);
    report.trajectory_point.push_back(slot < 3 ? traj.r.back()[slot] : traj.p.back()[slot - 3]);
  }
  for (double w : widths) {
    const PhaseSpaceState psi0 =
        gaussian_state(Representation::Momentum, axes, centre, std::vector<double>(axes.size(), w));
    const PhaseSpaceState psi = evolve_state(psi0, m0, field, t_end, dt);
    PureStateLimitRow row;
    row.width = w;
    row.centroid = centroid(psi);
    double e2 = 0.0;
    for (std::size_t k = 0; k < axes.size(); ++k) {
      const double d = row.centroid[k] - report.trajectory_point[k];
      e2 += d * d;
      row.error_cells = std::max(row.error_cells, std::abs(d) / axes[k].step());
    }
    row.error = std::sqrt(e2);
    report.rows.push_back(std::move(row));
  }
  report.monotone = true;
  for (std::size_t k = 1; k < report.rows.size(); ++k) {
    if (!(report.rows[k].error < report.rows[k - 1].error)) report.monotone = false;
  }
  return report;
}

}  // namespace relkvn::flow
