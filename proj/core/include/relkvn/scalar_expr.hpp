#pragma once

#include <complex>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "relkvn/number.hpp"

namespace relkvn::symbolic {

struct Node;

enum class NodeKind { Constant, Symbol, Sum, Product, LineIntegral };

/// Immutable complex-valued expression over named real symbols.
///
/// Construction keeps a light canonical form: sums and products are flattened,
/// numeric parts folded, like terms collected, and equal bases merged with
/// rational exponents. Nothing is distributed unless expand() is called.
class ScalarExpr {
 public:
  ScalarExpr();
  ScalarExpr(Number value);       // NOLINT(google-explicit-constructor)
  ScalarExpr(std::int64_t value);  // NOLINT(google-explicit-constructor)
  ScalarExpr(int value) : ScalarExpr(static_cast<std::int64_t>(value)) {}  // NOLINT
  explicit ScalarExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  static ScalarExpr symbol(const std::string& name);
  static ScalarExpr constant(double value) { return ScalarExpr(Number::from_double(value)); }
  static ScalarExpr imaginary_unit() { return ScalarExpr(Number::imaginary_unit()); }

  NodeKind kind() const noexcept;
  const Node& node() const noexcept { return *node_; }
  const Node* id() const noexcept { return node_.get(); }
  std::size_t hash() const noexcept;

  bool is_zero() const noexcept;
  bool is_one() const noexcept;
  bool is_constant() const noexcept { return kind() == NodeKind::Constant; }
  /// Numeric value of a Constant node.
  const Number& constant_value() const;

  /// Structural equality of the canonical forms.
  bool same_as(const ScalarExpr& other) const noexcept;

  std::set<std::string> free_symbols() const;
  std::string str() const;

 private:
  std::shared_ptr<const Node> node_;
};

struct Term {
  Number coeff;
  ScalarExpr expr;
};

struct Factor {
  ScalarExpr base;
  Rational exponent;
};

/// One coordinate of a straight-line path integral, see line_integral().
struct PathComponent {
  std::string symbol;
  ScalarExpr gradient;
  double reference = 0.0;
};

struct Node {
  NodeKind kind = NodeKind::Constant;
  std::size_t hash = 0;
  Number value;  // constant, sum offset, or product coefficient
  std::string name;
  std::vector<Term> terms;
  std::vector<Factor> factors;
  std::vector<PathComponent> path;
};

ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b);
ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b);
ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b);
ScalarExpr operator/(const ScalarExpr& a, const ScalarExpr& b);
ScalarExpr operator-(const ScalarExpr& a);
inline ScalarExpr& operator+=(ScalarExpr& a, const ScalarExpr& b) { return a = a + b; }
inline ScalarExpr& operator-=(ScalarExpr& a, const ScalarExpr& b) { return a = a - b; }
inline ScalarExpr& operator*=(ScalarExpr& a, const ScalarExpr& b) { return a = a * b; }

ScalarExpr pow(const ScalarExpr& base, Rational exponent);
ScalarExpr sqrt(const ScalarExpr& arg);
ScalarExpr conj(const ScalarExpr& e);

/// Exact partial derivative with respect to a symbol.
ScalarExpr diff(const ScalarExpr& e, const std::string& symbol);
/// Distributes products over sums raised to positive integer powers.
ScalarExpr expand(const ScalarExpr& e);
ScalarExpr substitute(const ScalarExpr& e, const std::map<std::string, ScalarExpr>& replacements);

/// Potential of a curl-free field: value at point y is
///   integral over tau in [0,1] of sum_k G_k(ref + tau (y - ref)) (y_k - ref_k).
/// The partial derivative with respect to a path symbol returns its gradient
/// component directly, so the field must be integrable for the result to be a potential.
ScalarExpr line_integral(std::vector<PathComponent> path);

/// Builders for the canonical node kinds.
ScalarExpr make_sum(const Number& constant, std::vector<Term> terms);
ScalarExpr make_product(const Number& coeff, std::vector<Factor> factors);

/// Well-known phase-space symbols (1-based component index).
namespace vars {
std::string x(int i);
std::string v(int i);
std::string p(int i);
inline const std::string t = "t";
bool is_phase_variable(const std::string& name);
}  // namespace vars

ScalarExpr x(int i);
ScalarExpr v(int i);
ScalarExpr p(int i);
ScalarExpr time_symbol();
ScalarExpr param(const std::string& name);

/// |v|^2 and the Lorentz factor (1 - |v|^2)^(-1/2) of the velocity variables.
ScalarExpr speed_squared();
ScalarExpr lorentz_gamma();

}  // namespace relkvn::symbolic
