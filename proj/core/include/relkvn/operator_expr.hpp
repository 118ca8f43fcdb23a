#pragma once

#include <array>
#include <compare>
#include <functional>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "relkvn/probe.hpp"
#include "relkvn/scalar_expr.hpp"

namespace relkvn::algebra {

using symbolic::ScalarExpr;

enum class Representation { Velocity, Momentum };

const char* to_string(Representation rep);

inline constexpr int kDefaultOrderCap = 6;

/// ∂x^a ∂w^b where w is v in the velocity representation and p in the momentum one.
struct DerivationMonomial {
  std::array<std::uint8_t, 3> a{};
  std::array<std::uint8_t, 3> b{};

  static DerivationMonomial dx(int i);
  static DerivationMonomial dw(int i);

  int order() const noexcept;
  bool is_identity() const noexcept { return order() == 0; }
  /// Entry k of the combined index: 0..2 position, 3..5 velocity/momentum.
  std::uint8_t at(int k) const noexcept { return k < 3 ? a[k] : b[k - 3]; }
  std::uint8_t& at(int k) noexcept { return k < 3 ? a[k] : b[k - 3]; }

  auto operator<=>(const DerivationMonomial&) const = default;

  /// In λ notation, e.g. "Lx1*Lv2^2"; "1" for the identity.
  std::string str(Representation rep) const;
};

/// Symbol differentiated by slot k (0..5) of a monomial.
const std::string& derivation_symbol(Representation rep, int k);

/// Finite sum of coefficient × ∂-monomial, coefficients on the left.
///
/// λ = -i∂, so a term stored as f·∂^α reads f·i^|α|·λ^α.
class OperatorExpr {
 public:
  using TermMap = std::map<DerivationMonomial, ScalarExpr>;

  explicit OperatorExpr(Representation rep = Representation::Velocity) : rep_(rep) {}

  static OperatorExpr scalar(const ScalarExpr& f, Representation rep = Representation::Velocity);
  static OperatorExpr term(const ScalarExpr& coeff, const DerivationMonomial& m,
                           Representation rep = Representation::Velocity);

  Representation representation() const noexcept { return rep_; }
  const TermMap& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_multiplicative() const noexcept;
  int order() const noexcept;
  /// Coefficient of ∂^m, zero if absent.
  ScalarExpr coefficient(const DerivationMonomial& m) const;
  /// Coefficient of the identity monomial.
  ScalarExpr scalar_part() const { return coefficient({}); }

  /// Adds c·∂^m, merging and dropping structural zeros.
  void add(const DerivationMonomial& m, const ScalarExpr& c);

  std::string str() const;

 private:
  Representation rep_;
  TermMap terms_;
};

OperatorExpr operator+(const OperatorExpr& a, const OperatorExpr& b);
OperatorExpr operator-(const OperatorExpr& a, const OperatorExpr& b);
OperatorExpr operator-(const OperatorExpr& a);
/// Left multiplication by a function: f·A.
OperatorExpr operator*(const ScalarExpr& f, const OperatorExpr& a);
/// Composition with the default order cap.
OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b);
inline OperatorExpr& operator+=(OperatorExpr& a, const OperatorExpr& b) { return a = a + b; }
inline OperatorExpr& operator-=(OperatorExpr& a, const OperatorExpr& b) { return a = a - b; }

OperatorExpr compose(const OperatorExpr& a, const OperatorExpr& b, int cap = kDefaultOrderCap);
OperatorExpr commutator(const OperatorExpr& a, const OperatorExpr& b, int cap = kDefaultOrderCap);
/// ½(AB + BA).
OperatorExpr symmetrize(const OperatorExpr& a, const OperatorExpr& b, int cap = kDefaultOrderCap);
/// Formal adjoint for the flat measure.
OperatorExpr adjoint(const OperatorExpr& a, int cap = kDefaultOrderCap);
/// Applies `f` to every coefficient.
OperatorExpr map_coefficients(const OperatorExpr& a, const std::function<ScalarExpr(const ScalarExpr&)>& f);

struct OpEqualReport {
  bool equal = true;
  double max_residual = 0.0;
  std::string worst_monomial;
  int trials = 0;
  int resamples = 0;
  symbolic::SamplePoint worst_point;
};

/// Monomial-by-monomial numeric equality of coefficients.
OpEqualReport op_equal(const OperatorExpr& a, const OperatorExpr& b, const symbolic::ProbeOptions& options = {});
OpEqualReport op_equal(const OperatorExpr& a, const OperatorExpr& b, double tol, std::uint64_t seed);
bool is_hermitian(const OperatorExpr& a, const symbolic::ProbeOptions& options = {});
bool is_hermitian(const OperatorExpr& a, double tol, std::uint64_t seed);

/// The irreducible set. Position and translation exist in both representations;
/// V and λv only in velocity, P and λp only in momentum.
OperatorExpr identity(Representation rep = Representation::Velocity);
OperatorExpr X(int i, Representation rep = Representation::Velocity);
OperatorExpr V(int i);
OperatorExpr P(int i);
OperatorExpr lambda_x(int i, Representation rep = Representation::Velocity);
OperatorExpr lambda_v(int i);
OperatorExpr lambda_p(int i);

/// Operator text: X1, V1, P1, Lx1, Lv1, Lp1, Lxp1, products with '*', S(A,B),
/// comm(A,B), plus scalar syntax (numbers, i, variables, parameters, sqrt, '^').
/// `names` resolves extra identifiers such as generator names. Velocity and
/// momentum tokens cannot be mixed.
OperatorExpr parse_operator(std::string_view text, const std::map<std::string, OperatorExpr>& names = {});

}  // namespace relkvn::algebra
