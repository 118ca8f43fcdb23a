#pragma once

#include <array>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "relkvn/generators.hpp"
#include "relkvn/operator_expr.hpp"

namespace relkvn::flow {

using algebra::Representation;
using Vec3d = std::array<double, 3>;
using Mat3d = std::array<Vec3d, 3>;

/// Numeric electromagnetic field in c = 1 units, unit charge.
class ForceFieldNum {
 public:
  struct Potentials {
    double phi = 0.0;
    Vec3d grad_phi{};
    Vec3d A{};
    Mat3d dA{};  // dA[i][j] = ∂_i A_j
  };
  using FieldFunction = std::function<void(const Vec3d& r, double t, Vec3d& E, Vec3d& B)>;
  using PotentialFunction = std::function<Potentials(const Vec3d& r, double t)>;

  /// Zero field.
  ForceFieldNum();

  /// Uniform E and B; potentials φ = -E·r and A = B×r/2.
  static ForceFieldNum uniform(const Vec3d& E, const Vec3d& B = {});
  /// Arbitrary (possibly time-dependent) fields. Without `potentials` the
  /// field cannot drive momentum-representation states.
  static ForceFieldNum from_functions(FieldFunction fields, PotentialFunction potentials = {});
  /// Compiles φ and A over x1..x3 and t. Every other symbol must be bound in
  /// `params`; ConfigError otherwise. E = -∇φ - ∂A/∂t, B = ∇×A.
  static ForceFieldNum compile(const generators::ForceField& field,
                               const std::map<std::string, double>& params = {});

  void fields(const Vec3d& r, double t, Vec3d& E, Vec3d& B) const;
  /// E + w×B.
  Vec3d force(const Vec3d& r, const Vec3d& w, double t) const;
  bool has_potentials() const noexcept { return static_cast<bool>(potentials_); }
  /// Throws ConfigError when the field was built without potentials.
  Potentials potentials(const Vec3d& r, double t) const;
  /// As potentials() but phi is left at zero; cheap when the derivatives are constant.
  Potentials potential_derivatives(const Vec3d& r, double t) const;
  bool is_uniform() const noexcept { return uniform_; }
  bool has_constant_derivatives() const noexcept { return constant_derivatives_ && has_potentials(); }

 private:
  bool uniform_ = true;
  Vec3d E0_{}, B0_{};
  FieldFunction fields_;
  PotentialFunction potentials_;
  PotentialFunction derivatives_;
  bool constant_derivatives_ = true;
  Potentials derivatives0_;
};

struct TrajectoryRecord {
  std::vector<double> t;
  std::vector<Vec3d> r, v, p;  // p = m0 γ v + A(r)
  double dt = 0.0;
  int method_order = 4;
  std::string method = "rk4";
};

/// Fixed-step RK4 for dr/dt = v, dv/dt = (F - (v·F) v) / (m0 γ). The step is
/// t_end / ceil(t_end / dt) so the last sample lands on t_end. Samples are kept
/// every `record_every` steps plus the final one.
/// Throws SpeedLimitBreached when |v| >= 1 and NonFiniteState on NaN/inf.
TrajectoryRecord integrate_trajectory(double m0, const ForceFieldNum& field, const Vec3d& r0, const Vec3d& v0,
                                      double t_end, double dt, int record_every = 1);

/// 1D uniform force from rest: v = at/sqrt(1+(at)²), x = (sqrt(1+(at)²) - 1)/a with a = F/m0.
std::pair<double, double> constant_force_oracle(double m0, double F, double t);

struct GridAxis {
  std::string variable;  // x1..x3, v1..v3 or p1..p3
  double min = 0.0;
  double max = 0.0;
  int points = 0;

  double step() const { return (max - min) / (points - 1); }
  double node(int k) const { return min + k * step(); }
};

/// Complex amplitude on a tensor grid, row-major with the last axis fastest.
/// Phase variables without an axis are held at zero.
class PhaseSpaceState {
 public:
  PhaseSpaceState() = default;
  /// Validates axes against the representation; velocity axes must lie inside (-1, 1).
  PhaseSpaceState(Representation rep, std::vector<GridAxis> axes, double t = 0.0);

  Representation representation() const noexcept { return rep_; }
  const std::vector<GridAxis>& axes() const noexcept { return axes_; }
  double time() const noexcept { return t_; }
  void set_time(double t) noexcept { t_ = t; }

  std::size_t size() const noexcept { return psi_.size(); }
  std::vector<std::complex<double>>& amplitudes() noexcept { return psi_; }
  const std::vector<std::complex<double>>& amplitudes() const noexcept { return psi_; }
  std::size_t stride(std::size_t axis) const { return strides_.at(axis); }
  /// Slot 0..5 (x1..x3, then v or p) of each axis.
  int slot(std::size_t axis) const { return slots_.at(axis); }
  int axis_of_slot(int slot) const;  // -1 if absent

  /// Phase-space point of a flat index; absent slots are zero.
  std::array<double, 6> point(std::size_t index) const;
  double cell_volume() const;
  /// Σ|ψ|² times the cell volume.
  double norm() const;

 private:
  Representation rep_ = Representation::Velocity;
  std::vector<GridAxis> axes_;
  std::vector<std::size_t> strides_;
  std::vector<int> slots_;
  std::vector<std::complex<double>> psi_;
  double t_ = 0.0;
};

/// x over [-10, 10] with 512 points and v over [-0.999, 0.999] with 511 points
/// (p over [-4, 4] with 511) for each of the first `dims` components. For
/// dims 2 and 3 every axis shrinks to 24 and 8 points.
std::vector<GridAxis> default_axes(Representation rep, int dims = 1);

/// Normalised product Gaussian with |ψ|² of standard deviation widths[k]
/// along axis k. Centres and widths are aligned with the axes.
PhaseSpaceState gaussian_state(Representation rep, std::vector<GridAxis> axes, const std::vector<double>& centre,
                               const std::vector<double>& width, double t = 0.0);

/// |ψ|² on the grid.
std::vector<double> born_density(const PhaseSpaceState& state);
/// Density-weighted mean of each axis variable.
std::vector<double> centroid(const PhaseSpaceState& state);
/// Coordinates of the largest |ψ|² node.
std::vector<double> density_peak(const PhaseSpaceState& state);
/// sqrt(Σ|a - b|² dV) on identical grids.
double l2_distance(const PhaseSpaceState& a, const PhaseSpaceState& b);

/// <ψ|O|ψ> by grid quadrature; derivations by fourth-order central
/// differences with zero amplitude outside the grid. `params` binds every
/// non-phase symbol; t is the state time.
std::complex<double> expectation(const PhaseSpaceState& state, const algebra::OperatorExpr& observable,
                                 const std::map<std::string, double>& params = {});

struct TransportDiagnostics {
  double norm_before = 0.0;
  double norm_after = 0.0;
  double mass_loss = 0.0;       // max(0, 1 - after/before)
  std::size_t exited_nodes = 0;  // characteristics whose foot left the grid
  int steps = 0;
  std::string warning;
};

/// Semi-Lagrangian transport from state.time() to t_end: every node is pulled
/// back along the characteristic to the initial time, ψ is interpolated there
/// with tensor cubic Lagrange weights, and in the velocity representation the
/// amplitude picks up exp(-½∫div). Momentum states follow the Hamiltonian
/// flow of sqrt((p-A)² + m0²) + φ.
PhaseSpaceState evolve_state(const PhaseSpaceState& state, double m0, const ForceFieldNum& field, double t_end,
                             double dt = 1e-3, TransportDiagnostics* diagnostics = nullptr);

/// Applies exp(-i s K_axis) at t = 0 by transporting along the flow of K's
/// vector field in the rapidity. Velocity representation only.
PhaseSpaceState boost_state(const PhaseSpaceState& state, int axis, double s, double ds = 1e-2,
                            TransportDiagnostics* diagnostics = nullptr);

/// Characteristic vector field over (x1..x3, w1..w3) with all six slots
/// retained; returns its divergence. The Liouvillian is -i(f·∂ + ½ div f).
double liouville_field(Representation rep, double m0, const ForceFieldNum& field, const std::array<double, 6>& z,
                       double t, std::array<double, 6>& dz);
/// Same for K_axis at t = 0 in the velocity representation.
double boost_field(int axis, const std::array<double, 6>& z, std::array<double, 6>& dz);

/// Velocity-addition image of a velocity under a boost of rapidity s along `axis`.
Vec3d boosted_velocity(const Vec3d& v, int axis, double s);

/// Resamples a velocity state onto momentum axes via p = m0 γ v + A(r), with
/// the half-density factor of the change of variables.
PhaseSpaceState to_momentum_representation(const PhaseSpaceState& state, double m0, const ForceFieldNum& field,
                                           const std::vector<GridAxis>& momentum_axes);

struct PureStateLimitRow {
  double width = 0.0;
  std::vector<double> centroid;
  double error = 0.0;        // Euclidean distance to the trajectory point
  double error_cells = 0.0;  // largest per-axis distance in grid steps
};

struct PureStateLimitReport {
  std::vector<double> trajectory_point;  // (r, p) on the grid axes at t_end
  std::vector<PureStateLimitRow> rows;   // widths in decreasing order
  bool monotone = false;                 // every successive error ratio < 1
};

/// Evolves momentum-representation Gaussians of shrinking width centred at
/// (r0, p0) and compares their centroids at t_end with the trajectory, which
/// is integrated with a step of at most 1e-3.
PureStateLimitReport pure_state_limit_check(double m0, const ForceFieldNum& field, const Vec3d& r0, const Vec3d& p0,
                                            std::vector<double> widths, double t_end,
                                            const std::vector<GridAxis>& axes, double dt = 1e-2);

}  // namespace relkvn::flow
