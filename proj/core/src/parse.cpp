#include "relkvn/parse.hpp"

#include "detail/lexer.hpp"
#include "relkvn/error.hpp"

namespace relkvn::symbolic {

using detail::Lexer;
using detail::Tok;

Number parse_number_literal(const std::string& text) {
  if (auto r = rational_from_decimal(text)) return Number(*r);
  try {
    return Number::from_double(std::stod(text));
  } catch (const std::exception&) {
    throw ParseError("bad number literal '" + text + "'");
  }
}

Rational exponent_from(const ScalarExpr& e) {
  if (!e.is_constant()) throw ParseError("exponent must be a constant, got " + e.str());
  const Number& n = e.constant_value();
  if (!n.exact() || !n.im().is_zero()) throw ParseError("exponent must be a real rational, got " + e.str());
  return n.re();
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) {}

  ScalarExpr parse() {
    ScalarExpr e = expr();
    if (lex_.peek().kind != Tok::End) lex_.fail("trailing input");
    return e;
  }

 private:
  ScalarExpr expr() {
    ScalarExpr acc = term();
    for (;;) {
      if (lex_.accept('+')) {
        acc = acc + term();
      } else if (lex_.accept('-')) {
        acc = acc - term();
      } else {
        return acc;
      }
    }
  }

  ScalarExpr term() {
    ScalarExpr acc = unary();
    for (;;) {
      if (lex_.accept('*')) {
        acc = acc * unary();
      } else if (lex_.accept('/')) {
        ScalarExpr d = unary();
        if (d.is_zero()) lex_.fail("division by zero");
        acc = acc / d;
      } else {
        return acc;
      }
    }
  }

  ScalarExpr unary() {
    if (lex_.accept('-')) return -unary();
    if (lex_.accept('+')) return unary();
    return power();
  }

  ScalarExpr power() {
    ScalarExpr base = atom();
    if (lex_.accept('^')) return pow(base, exponent_from(unary()));
    return base;
  }

  ScalarExpr atom() {
    const auto& tk = lex_.peek();
    if (tk.kind == Tok::Number) return ScalarExpr(parse_number_literal(lex_.take().text));
    if (lex_.accept('(')) {
      ScalarExpr e = expr();
      lex_.expect(')');
      return e;
    }
    if (tk.kind == Tok::Ident) {
      const std::string name = lex_.take().text;
      if (name == "i") return ScalarExpr::imaginary_unit();
      if (name == "sqrt") {
        lex_.expect('(');
        ScalarExpr e = expr();
        lex_.expect(')');
        return sqrt(e);
      }
      return ScalarExpr::symbol(name);
    }
    lex_.fail("expected a number, name or '('");
  }

  Lexer lex_;
};

}  // namespace

ScalarExpr parse_scalar(std::string_view text) { return Parser(text).parse(); }

}  // namespace relkvn::symbolic
