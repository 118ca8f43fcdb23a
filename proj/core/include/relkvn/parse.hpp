#pragma once

#include <string_view>

#include "relkvn/scalar_expr.hpp"

namespace relkvn::symbolic {

/// Infix text to expression.
///
///   expr   := term (('+' | '-') term)*
///   term   := unary (('*' | '/') unary)*
///   unary  := ('-' | '+') unary | power
///   power  := atom ('^' unary)?          exponent must be a rational constant
///   atom   := number | 'i' | name | 'sqrt' '(' expr ')' | '(' expr ')'
///
/// x1..x3, v1..v3, p1..p3 and t are phase variables; any other name is a parameter.
ScalarExpr parse_scalar(std::string_view text);

/// Exact rational when the literal allows it, nearest double otherwise.
Number parse_number_literal(const std::string& text);

/// Exponent of `^`: a real rational constant. Throws ParseError otherwise.
Rational exponent_from(const ScalarExpr& e);

}  // namespace relkvn::symbolic
