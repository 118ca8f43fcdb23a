#include <optional>

#include "detail/lexer.hpp"
#include "relkvn/error.hpp"
#include "relkvn/operator_expr.hpp"
#include "relkvn/parse.hpp"

namespace relkvn::algebra {

using detail::Lexer;
using detail::Tok;

namespace {

// Index 1..3 when `name` is `prefix` followed by a single digit in that range.
int indexed(const std::string& name, std::string_view prefix) {
  if (name.size() != prefix.size() + 1 || name.compare(0, prefix.size(), prefix) != 0) return 0;
  const char d = name.back();
  return (d >= '1' && d <= '3') ? d - '0' : 0;
}

std::optional<Representation> token_representation(const std::string& name,
                                                   const std::map<std::string, OperatorExpr>& names) {
  if (auto it = names.find(name); it != names.end()) return it->second.representation();
  for (const char* p : {"V", "Lv", "v"})
    if (indexed(name, p)) return Representation::Velocity;
  for (const char* p : {"P", "Lp", "Lxp", "p"})
    if (indexed(name, p)) return Representation::Momentum;
  return std::nullopt;
}

class Parser {
 public:
  Parser(std::string_view text, const std::map<std::string, OperatorExpr>& names, Representation rep)
      : lex_(text), names_(names), rep_(rep) {}

  OperatorExpr parse() {
    OperatorExpr e = expr();
    if (lex_.peek().kind != Tok::End) lex_.fail("trailing input");
    return e;
  }

 private:
  OperatorExpr expr() {
    OperatorExpr acc = term();
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

  OperatorExpr term() {
    OperatorExpr acc = unary();
    for (;;) {
      if (lex_.accept('*')) {
        acc = compose(acc, unary());
      } else if (lex_.accept('/')) {
        const OperatorExpr d = unary();
        if (!d.is_multiplicative() || d.is_zero()) lex_.fail("divisor must be a nonzero function");
        acc = compose(acc, OperatorExpr::scalar(1 / d.scalar_part(), rep_));
      } else {
        return acc;
      }
    }
  }

  OperatorExpr unary() {
    if (lex_.accept('-')) return -unary();
    if (lex_.accept('+')) return unary();
    return power();
  }

  OperatorExpr power() {
    OperatorExpr base = atom();
    if (!lex_.accept('^')) return base;
    const OperatorExpr e = unary();
    if (!e.is_multiplicative()) lex_.fail("exponent must be a constant");
    const auto q = symbolic::exponent_from(e.scalar_part());
    if (base.is_multiplicative()) return OperatorExpr::scalar(symbolic::pow(base.scalar_part(), q), rep_);
    if (!q.is_integer() || q.num() < 0) lex_.fail("differential operators take nonnegative integer powers only");
    OperatorExpr out = identity(rep_);
    for (std::int64_t k = 0; k < q.num(); ++k) out = compose(out, base);
    return out;
  }

  std::pair<OperatorExpr, OperatorExpr> two_args() {
    lex_.expect('(');
    OperatorExpr a = expr();
    lex_.expect(',');
    OperatorExpr b = expr();
    lex_.expect(')');
    return {std::move(a), std::move(b)};
  }

  OperatorExpr atom() {
    const auto& tk = lex_.peek();
    if (tk.kind == Tok::Number) {
      return OperatorExpr::scalar(ScalarExpr(symbolic::parse_number_literal(lex_.take().text)), rep_);
    }
    if (lex_.accept('(')) {
      OperatorExpr e = expr();
      lex_.expect(')');
      return e;
    }
    if (tk.kind != Tok::Ident) lex_.fail("expected an operator, number or '('");
    const std::string name = lex_.take().text;
    if (auto it = names_.find(name); it != names_.end()) return it->second;
    if (name == "S") {
      auto [a, b] = two_args();
      return symmetrize(a, b);
    }
    if (name == "comm") {
      auto [a, b] = two_args();
      return commutator(a, b);
    }
    if (name == "sqrt") {
      lex_.expect('(');
      OperatorExpr a = expr();
      lex_.expect(')');
      if (!a.is_multiplicative()) lex_.fail("sqrt of a differential operator");
      return OperatorExpr::scalar(symbolic::sqrt(a.scalar_part()), rep_);
    }
    if (name == "i") return OperatorExpr::scalar(ScalarExpr::imaginary_unit(), rep_);
    if (int k = indexed(name, "X")) return X(k, rep_);
    if (int k = indexed(name, "V")) return V(k);
    if (int k = indexed(name, "P")) return P(k);
    if (int k = indexed(name, "Lx")) return lambda_x(k, rep_);
    if (int k = indexed(name, "Lxp")) return lambda_x(k, Representation::Momentum);
    if (int k = indexed(name, "Lv")) return lambda_v(k);
    if (int k = indexed(name, "Lp")) return lambda_p(k);
    return OperatorExpr::scalar(ScalarExpr::symbol(name), rep_);
  }

  Lexer lex_;
  const std::map<std::string, OperatorExpr>& names_;
  Representation rep_;
};

}  // namespace

OperatorExpr parse_operator(std::string_view text, const std::map<std::string, OperatorExpr>& names) {
  std::optional<Representation> rep;
  Lexer scan(text);
  while (scan.peek().kind != Tok::End) {
    const auto tk = scan.take();
    if (tk.kind != Tok::Ident) continue;
    if (auto r = token_representation(tk.text, names)) {
      if (rep && *rep != *r) throw RepresentationMismatch("operator text mixes velocity and momentum symbols");
      rep = r;
    }
  }
  return Parser(text, names, rep.value_or(Representation::Velocity)).parse();
}

}  // namespace relkvn::algebra
