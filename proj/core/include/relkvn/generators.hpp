#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "relkvn/operator_expr.hpp"
#include "relkvn/probe.hpp"
#include "relkvn/report.hpp"

namespace relkvn::generators {

using algebra::OperatorExpr;
using algebra::Representation;
using symbolic::ScalarExpr;
using Vec3 = std::array<ScalarExpr, 3>;

/// Static electromagnetic potentials φ(x), A(x).
struct ForceField {
  ScalarExpr phi = 0;
  Vec3 A{0, 0, 0};

  /// φ = -F x_axis, i.e. a uniform force F along `axis` (1-based).
  static ForceField constant_force(const ScalarExpr& F, int axis = 1);

  bool has_vector_potential() const;
  bool is_free() const;

  Vec3 E() const;  // -∇φ
  Vec3 B() const;  // ∇×A
  /// E + w×B for a given velocity vector.
  Vec3 force(const Vec3& velocity) const;
};

/// Ten Poincaré generators plus the auxiliary irreducible set.
struct GeneratorSet {
  Representation rep = Representation::Velocity;
  std::string name;
  std::array<OperatorExpr, 3> J, K, lambda_r;
  OperatorExpr L;
  std::array<OperatorExpr, 3> X, W, lambda_w;  // W is V or P, lambda_w is λv or λp
  ScalarExpr m0 = 1;
  ScalarExpr t = 0;

  /// J1..3, K1..3, λ1..3, L in that order.
  std::vector<std::pair<std::string, OperatorExpr>> generators() const;
};

/// Velocity representation. Only the first `dims` components take part in
/// V², sums and the force (reduced models for 1D/2D grids).
ScalarExpr gamma(int dims = 3);
ScalarExpr speed_squared(int dims = 3);

GeneratorSet build_free_generators(const ScalarExpr& m0, const ScalarExpr& t = 0);
/// Free J, K, λ with the Lorentz-force Liouvillian.
GeneratorSet build_interacting_generators(const ScalarExpr& m0, const ForceField& field, const ScalarExpr& t = 0);
OperatorExpr build_free_liouvillian(int dims = 3);
OperatorExpr build_interacting_liouvillian(const ScalarExpr& m0, const ForceField& field, int dims = 3);

/// "K": adds X1+X2+X3 to every boost. "L": L becomes W1 times the first
/// position translation with the free speed factor. Unknown names throw ConfigError.
GeneratorSet mutate(GeneratorSet gen, const std::string& what);

enum class ClosureScope { All, WithoutLiouvillian };

/// All 45 brackets among the ten generators against the Poincaré structure
/// constants. With WithoutLiouvillian every relation whose left or right side
/// involves L ([J,L], [K,L], [λ,L], [K,λ]) is informational.
VerificationReport verify_poincare_closure(const GeneratorSet& gen, const symbolic::ProbeOptions& options = {},
                                           ClosureScope scope = ClosureScope::All);

/// i[L, m0 γ V_i] = F_i for the first `dims` components.
VerificationReport verify_force_equation(const ScalarExpr& m0, const ForceField& field,
                                         const symbolic::ProbeOptions& options = {}, int dims = 3);

struct LagrangianStructure {
  ScalarExpr kinetic_coenergy;  // T*
  OperatorExpr U;
  OperatorExpr lagrangian;      // T* - U
  std::array<OperatorExpr, 3> P;  // i[λv, 𝓛]
};

LagrangianStructure build_lagrangian_structure(const ScalarExpr& m0, const ForceField& field);

/// Φ_α[𝓛] = -[L,[λv_α, 𝓛]] - i[λx_α, 𝓛].
std::array<OperatorExpr, 3> apply_euler_lagrange(const OperatorExpr& lagrangian, const OperatorExpr& L);

/// [P_i, λv_j] against i ∂P_i/∂V_j (asserted) and the printed γ-power variant (informational).
VerificationReport verify_canonical_momentum(const ScalarExpr& m0, const ForceField& field,
                                             const symbolic::ProbeOptions& options = {});

/// Energy function sqrt((p - A)² + m0²).
ScalarExpr momentum_energy(const ScalarExpr& m0, const ForceField& field);

/// Free momentum-representation set: J, K, λ' and L' = P H^-1 λ'.
GeneratorSet build_momentum_generators(const ScalarExpr& m0, const ScalarExpr& t = 0);
/// Same J, K, λ'; L' from the general-A expression when A ≠ 0, the electric form otherwise.
GeneratorSet build_momentum_generators(const ScalarExpr& m0, const ForceField& field, const ScalarExpr& t = 0);

/// H^-1 P·λ' + F·λp, valid for A = 0.
OperatorExpr momentum_liouvillian_electric(const ScalarExpr& m0, const ForceField& field);
/// General-A expression with the outer symmetrization; first term read as
/// H^-1 (P_i - A_i)(λ'_i + ∂_i A_j λp_j).
OperatorExpr momentum_liouvillian_printed(const ScalarExpr& m0, const ForceField& field);
/// Hamiltonian vector field of sqrt((p-A)² + m0²) + φ: V·λ' + (E_j + V_i ∂_j A_i) λp_j with V = (p-A)/H.
OperatorExpr momentum_liouvillian_transported(const ScalarExpr& m0, const ForceField& field);

/// Generating function H with op = -i(∂H/∂p·∂x - ∂H/∂x·∂p), normalised to H(0,0) = 0,
/// or nullopt when op is not of that form.
std::optional<ScalarExpr> poisson_correspondence(const OperatorExpr& op, const symbolic::ProbeOptions& options = {});

}  // namespace relkvn::generators
