#include "relkvn/scalar_expr.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "relkvn/error.hpp"

namespace relkvn::symbolic {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t fnv(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

std::size_t rational_hash(const Rational& r) {
  return mix(static_cast<std::size_t>(r.num()), static_cast<std::size_t>(r.den()));
}

ScalarExpr make_constant(const Number& n) {
  auto node = std::make_shared<Node>();
  node->kind = NodeKind::Constant;
  node->value = n;
  node->hash = mix(0xC0, n.hash());
  return ScalarExpr(std::move(node));
}

const ScalarExpr& zero_expr() {
  static const ScalarExpr z = make_constant(Number(0));
  return z;
}

bool deep_equal(const Node& a, const Node& b);

bool equal(const ScalarExpr& a, const ScalarExpr& b) {
  if (a.id() == b.id()) return true;
  if (a.hash() != b.hash()) return false;
  return deep_equal(a.node(), b.node());
}

bool deep_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::Constant:
      return a.value == b.value;
    case NodeKind::Symbol:
      return a.name == b.name;
    case NodeKind::Sum:
      if (!(a.value == b.value) || a.terms.size() != b.terms.size()) return false;
      for (std::size_t k = 0; k < a.terms.size(); ++k) {
        if (!(a.terms[k].coeff == b.terms[k].coeff) || !equal(a.terms[k].expr, b.terms[k].expr)) return false;
      }
      return true;
    case NodeKind::Product:
      if (!(a.value == b.value) || a.factors.size() != b.factors.size()) return false;
      for (std::size_t k = 0; k < a.factors.size(); ++k) {
        if (!(a.factors[k].exponent == b.factors[k].exponent) || !equal(a.factors[k].base, b.factors[k].base)) {
          return false;
        }
      }
      return true;
    case NodeKind::LineIntegral:
      if (a.path.size() != b.path.size()) return false;
      for (std::size_t k = 0; k < a.path.size(); ++k) {
        if (a.path[k].symbol != b.path[k].symbol || a.path[k].reference != b.path[k].reference ||
            !equal(a.path[k].gradient, b.path[k].gradient)) {
          return false;
        }
      }
      return true;
  }
  return false;
}

// Splits c * rest so that sums can collect like terms.
std::pair<Number, ScalarExpr> split_coefficient(const ScalarExpr& e) {
  if (e.kind() == NodeKind::Product && !e.node().value.is_one()) {
    return {e.node().value, make_product(Number(1), e.node().factors)};
  }
  return {Number(1), e};
}

bool foldable(const Factor& f) {
  if (!f.exponent.is_integer()) return false;
  return f.base.kind() == NodeKind::Constant || f.base.kind() == NodeKind::Product;
}

}  // namespace

ScalarExpr make_sum(const Number& constant, std::vector<Term> raw) {
  Number offset = constant;
  std::vector<Term> flat;
  flat.reserve(raw.size());
  for (auto& term : raw) {
    if (term.coeff.is_zero()) continue;
    const ScalarExpr& e = term.expr;
    switch (e.kind()) {
      case NodeKind::Constant:
        offset = offset + term.coeff * e.constant_value();
        break;
      case NodeKind::Sum:
        offset = offset + term.coeff * e.node().value;
        for (const auto& sub : e.node().terms) flat.push_back({term.coeff * sub.coeff, sub.expr});
        break;
      default: {
        auto [c, rest] = split_coefficient(e);
        const Number k = term.coeff * c;
        if (rest.kind() == NodeKind::Sum) {
          offset = offset + k * rest.node().value;
          for (const auto& sub : rest.node().terms) flat.push_back({k * sub.coeff, sub.expr});
        } else {
          flat.push_back({k, rest});
        }
      }
    }
  }
  std::stable_sort(flat.begin(), flat.end(),
                   [](const Term& a, const Term& b) { return a.expr.hash() < b.expr.hash(); });
  std::vector<Term> merged;
  merged.reserve(flat.size());
  std::size_t group_start = 0;
  for (auto& term : flat) {
    if (!merged.empty() && merged.back().expr.hash() != term.expr.hash()) group_start = merged.size();
    bool found = false;
    for (std::size_t k = group_start; k < merged.size(); ++k) {
      if (equal(merged[k].expr, term.expr)) {
        merged[k].coeff = merged[k].coeff + term.coeff;
        found = true;
        break;
      }
    }
    if (!found) merged.push_back(std::move(term));
  }
  std::erase_if(merged, [](const Term& t) { return t.coeff.is_zero(); });

  if (merged.empty()) return make_constant(offset);
  if (offset.is_zero() && merged.size() == 1) {
    const Term& only = merged.front();
    if (only.coeff.is_one()) return only.expr;
    return make_product(only.coeff, {{only.expr, Rational(1)}});
  }
  auto node = std::make_shared<Node>();
  node->kind = NodeKind::Sum;
  node->value = offset;
  std::size_t h = mix(0x5A, offset.hash());
  for (const auto& t : merged) h = mix(mix(h, t.coeff.hash()), t.expr.hash());
  node->hash = h;
  node->terms = std::move(merged);
  return ScalarExpr(std::move(node));
}

ScalarExpr make_product(const Number& coeff_in, std::vector<Factor> raw) {
  if (coeff_in.is_zero()) return zero_expr();
  Number coeff = coeff_in;
  std::vector<Factor> flat;
  flat.reserve(raw.size());
  for (auto& f : raw) {
    if (f.exponent.is_zero()) continue;
    const ScalarExpr& b = f.base;
    if (b.kind() == NodeKind::Constant && f.exponent.is_integer()) {
      const Number& bv = b.constant_value();
      if (bv.is_zero()) {
        if (f.exponent < Rational(0)) throw DomainError("division by zero");
        return zero_expr();
      }
      coeff = coeff * bv.pow(f.exponent.num());
    } else if (b.kind() == NodeKind::Product && f.exponent.is_integer()) {
      coeff = coeff * b.node().value.pow(f.exponent.num());
      for (const auto& sub : b.node().factors) flat.push_back({sub.base, sub.exponent * f.exponent});
    } else if (b.kind() == NodeKind::Constant && b.constant_value().is_one()) {
      continue;
    } else {
      flat.push_back(std::move(f));
    }
  }
  if (coeff.is_zero()) return zero_expr();
  std::stable_sort(flat.begin(), flat.end(),
                   [](const Factor& a, const Factor& b) { return a.base.hash() < b.base.hash(); });
  std::vector<Factor> merged;
  merged.reserve(flat.size());
  std::size_t group_start = 0;
  for (auto& f : flat) {
    if (!merged.empty() && merged.back().base.hash() != f.base.hash()) group_start = merged.size();
    bool found = false;
    for (std::size_t k = group_start; k < merged.size(); ++k) {
      if (equal(merged[k].base, f.base)) {
        merged[k].exponent = merged[k].exponent + f.exponent;
        found = true;
        break;
      }
    }
    if (!found) merged.push_back(std::move(f));
  }
  std::erase_if(merged, [](const Factor& f) { return f.exponent.is_zero(); });
  if (std::any_of(merged.begin(), merged.end(), foldable)) return make_product(coeff, std::move(merged));

  if (merged.empty()) return make_constant(coeff);
  if (coeff.is_one() && merged.size() == 1 && merged.front().exponent.is_one()) return merged.front().base;
  auto node = std::make_shared<Node>();
  node->kind = NodeKind::Product;
  node->value = coeff;
  std::size_t h = mix(0x9D, coeff.hash());
  for (const auto& f : merged) h = mix(mix(h, f.base.hash()), rational_hash(f.exponent));
  node->hash = h;
  node->factors = std::move(merged);
  return ScalarExpr(std::move(node));
}

ScalarExpr::ScalarExpr() : node_(zero_expr().node_) {}
ScalarExpr::ScalarExpr(Number value) : node_(make_constant(value).node_) {}
ScalarExpr::ScalarExpr(std::int64_t value) : ScalarExpr(Number(value)) {}

ScalarExpr ScalarExpr::symbol(const std::string& name) {
  if (name.empty()) throw std::invalid_argument("empty symbol name");
  auto node = std::make_shared<Node>();
  node->kind = NodeKind::Symbol;
  node->name = name;
  node->hash = mix(0x5B, fnv(name));
  return ScalarExpr(std::move(node));
}

NodeKind ScalarExpr::kind() const noexcept { return node_->kind; }
std::size_t ScalarExpr::hash() const noexcept { return node_->hash; }

bool ScalarExpr::is_zero() const noexcept { return kind() == NodeKind::Constant && node_->value.is_zero(); }
bool ScalarExpr::is_one() const noexcept { return kind() == NodeKind::Constant && node_->value.is_one(); }

const Number& ScalarExpr::constant_value() const {
  if (kind() != NodeKind::Constant) throw std::logic_error("expression is not a constant");
  return node_->value;
}

bool ScalarExpr::same_as(const ScalarExpr& other) const noexcept { return equal(*this, other); }

ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  return make_sum(Number(0), {{Number(1), a}, {Number(1), b}});
}

ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b) {
  if (b.is_zero()) return a;
  return make_sum(Number(0), {{Number(1), a}, {Number(-1), b}});
}

ScalarExpr operator-(const ScalarExpr& a) { return make_sum(Number(0), {{Number(-1), a}}); }

ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b) {
  if (a.is_zero() || b.is_zero()) return zero_expr();
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  return make_product(Number(1), {{a, Rational(1)}, {b, Rational(1)}});
}

ScalarExpr operator/(const ScalarExpr& a, const ScalarExpr& b) {
  if (b.is_zero()) throw DomainError("division by zero");
  if (a.is_zero()) return zero_expr();
  return make_product(Number(1), {{a, Rational(1)}, {b, Rational(-1)}});
}

ScalarExpr pow(const ScalarExpr& base, Rational exponent) {
  return make_product(Number(1), {{base, exponent}});
}

ScalarExpr sqrt(const ScalarExpr& arg) { return pow(arg, Rational(1, 2)); }

namespace {

class Rewriter {
 public:
  template <typename F>
  ScalarExpr memo(const ScalarExpr& e, F&& compute) {
    auto it = cache_.find(e.id());
    if (it != cache_.end()) return it->second;
    ScalarExpr r = compute();
    cache_.emplace(e.id(), r);
    keep_.push_back(e);
    return r;
  }

 private:
  std::unordered_map<const Node*, ScalarExpr> cache_;
  std::vector<ScalarExpr> keep_;
};

ScalarExpr conj_rec(const ScalarExpr& e, Rewriter& rw) {
  return rw.memo(e, [&]() -> ScalarExpr {
    const Node& n = e.node();
    switch (n.kind) {
      case NodeKind::Constant:
        return ScalarExpr(n.value.conj());
      case NodeKind::Symbol:
        return e;
      case NodeKind::Sum: {
        std::vector<Term> ts;
        for (const auto& t : n.terms) ts.push_back({t.coeff.conj(), conj_rec(t.expr, rw)});
        return make_sum(n.value.conj(), std::move(ts));
      }
      case NodeKind::Product: {
        std::vector<Factor> fs;
        for (const auto& f : n.factors) fs.push_back({conj_rec(f.base, rw), f.exponent});
        return make_product(n.value.conj(), std::move(fs));
      }
      case NodeKind::LineIntegral: {
        auto path = n.path;
        for (auto& c : path) c.gradient = conj_rec(c.gradient, rw);
        return line_integral(std::move(path));
      }
    }
    return e;
  });
}

ScalarExpr diff_rec(const ScalarExpr& e, const std::string& s, Rewriter& rw) {
  return rw.memo(e, [&]() -> ScalarExpr {
    const Node& n = e.node();
    switch (n.kind) {
      case NodeKind::Constant:
        return zero_expr();
      case NodeKind::Symbol:
        return n.name == s ? ScalarExpr(1) : zero_expr();
      case NodeKind::Sum: {
        std::vector<Term> ts;
        for (const auto& t : n.terms) {
          ScalarExpr d = diff_rec(t.expr, s, rw);
          if (!d.is_zero()) ts.push_back({t.coeff, d});
        }
        return make_sum(Number(0), std::move(ts));
      }
      case NodeKind::Product: {
        std::vector<Term> ts;
        for (std::size_t k = 0; k < n.factors.size(); ++k) {
          ScalarExpr d = diff_rec(n.factors[k].base, s, rw);
          if (d.is_zero()) continue;
          std::vector<Factor> fs = n.factors;
          const Rational e_k = fs[k].exponent;
          fs[k].exponent = e_k - Rational(1);
          fs.push_back({d, Rational(1)});
          ts.push_back({Number(1), make_product(n.value * Number(e_k), std::move(fs))});
        }
        return make_sum(Number(0), std::move(ts));
      }
      case NodeKind::LineIntegral: {
        for (const auto& c : n.path) {
          if (c.symbol == s) return c.gradient;
        }
        auto path = n.path;
        bool all_zero = true;
        for (auto& c : path) {
          c.gradient = diff_rec(c.gradient, s, rw);
          all_zero = all_zero && c.gradient.is_zero();
        }
        if (all_zero) return zero_expr();
        return line_integral(std::move(path));
      }
    }
    return zero_expr();
  });
}

std::vector<Term> as_terms(const ScalarExpr& e, Number& offset) {
  if (e.kind() == NodeKind::Constant) {
    offset = e.constant_value();
    return {};
  }
  if (e.kind() == NodeKind::Sum) {
    offset = e.node().value;
    return e.node().terms;
  }
  offset = Number(0);
  return {{Number(1), e}};
}

ScalarExpr distribute(const ScalarExpr& a, const ScalarExpr& b) {
  Number oa, ob;
  const auto ta = as_terms(a, oa);
  const auto tb = as_terms(b, ob);
  std::vector<Term> out;
  out.reserve((ta.size() + 1) * (tb.size() + 1));
  for (const auto& x : ta) {
    if (!ob.is_zero()) out.push_back({x.coeff * ob, x.expr});
    for (const auto& y : tb) out.push_back({x.coeff * y.coeff, x.expr * y.expr});
  }
  if (!oa.is_zero()) {
    for (const auto& y : tb) out.push_back({oa * y.coeff, y.expr});
  }
  return make_sum(oa * ob, std::move(out));
}

ScalarExpr expand_rec(const ScalarExpr& e, Rewriter& rw) {
  return rw.memo(e, [&]() -> ScalarExpr {
    const Node& n = e.node();
    switch (n.kind) {
      case NodeKind::Constant:
      case NodeKind::Symbol:
        return e;
      case NodeKind::LineIntegral: {
        auto path = n.path;
        for (auto& c : path) c.gradient = expand_rec(c.gradient, rw);
        return line_integral(std::move(path));
      }
      case NodeKind::Sum: {
        std::vector<Term> ts;
        for (const auto& t : n.terms) ts.push_back({t.coeff, expand_rec(t.expr, rw)});
        return make_sum(n.value, std::move(ts));
      }
      case NodeKind::Product: {
        ScalarExpr acc(n.value);
        std::vector<Factor> atoms;
        for (const auto& f : n.factors) {
          ScalarExpr b = expand_rec(f.base, rw);
          if (b.kind() == NodeKind::Sum && f.exponent.is_integer() && f.exponent.num() > 0) {
            for (std::int64_t k = 0; k < f.exponent.num(); ++k) acc = distribute(acc, b);
          } else {
            atoms.push_back({b, f.exponent});
          }
        }
        return distribute(acc, make_product(Number(1), std::move(atoms)));
      }
    }
    return e;
  });
}

ScalarExpr subst_rec(const ScalarExpr& e, const std::map<std::string, ScalarExpr>& m, Rewriter& rw) {
  return rw.memo(e, [&]() -> ScalarExpr {
    const Node& n = e.node();
    switch (n.kind) {
      case NodeKind::Constant:
        return e;
      case NodeKind::Symbol: {
        auto it = m.find(n.name);
        return it == m.end() ? e : it->second;
      }
      case NodeKind::Sum: {
        std::vector<Term> ts;
        for (const auto& t : n.terms) ts.push_back({t.coeff, subst_rec(t.expr, m, rw)});
        return make_sum(n.value, std::move(ts));
      }
      case NodeKind::Product: {
        std::vector<Factor> fs;
        for (const auto& f : n.factors) fs.push_back({subst_rec(f.base, m, rw), f.exponent});
        return make_product(n.value, std::move(fs));
      }
      case NodeKind::LineIntegral: {
        auto path = n.path;
        for (auto& c : path) {
          if (m.count(c.symbol)) throw std::invalid_argument("cannot substitute a path coordinate of a line integral");
          c.gradient = subst_rec(c.gradient, m, rw);
        }
        return line_integral(std::move(path));
      }
    }
    return e;
  });
}

void collect_symbols(const ScalarExpr& e, std::set<std::string>& out, std::set<const Node*>& seen) {
  if (!seen.insert(e.id()).second) return;
  const Node& n = e.node();
  switch (n.kind) {
    case NodeKind::Constant:
      return;
    case NodeKind::Symbol:
      out.insert(n.name);
      return;
    case NodeKind::Sum:
      for (const auto& t : n.terms) collect_symbols(t.expr, out, seen);
      return;
    case NodeKind::Product:
      for (const auto& f : n.factors) collect_symbols(f.base, out, seen);
      return;
    case NodeKind::LineIntegral:
      for (const auto& c : n.path) {
        out.insert(c.symbol);
        collect_symbols(c.gradient, out, seen);
      }
      return;
  }
}

void print(const ScalarExpr& e, std::ostream& os, bool wrap_sum);

void print_factor(const Factor& f, std::ostream& os) {
  const bool atomic = f.base.kind() == NodeKind::Symbol ||
                      (f.base.kind() == NodeKind::Constant && f.base.constant_value().is_real() &&
                       f.base.constant_value().exact() && f.base.constant_value().re().is_integer() &&
                       !(f.base.constant_value().re() < Rational(0)));
  if (f.exponent.is_one()) {
    print(f.base, os, true);
    return;
  }
  if (atomic) {
    print(f.base, os, true);
  } else {
    os << "(";
    print(f.base, os, false);
    os << ")";
  }
  if (f.exponent.is_integer() && !(f.exponent < Rational(0))) {
    os << "^" << f.exponent.num();
  } else {
    os << "^(" << f.exponent.str() << ")";
  }
}

void print_product_body(const Node& n, std::ostream& os) {
  for (std::size_t k = 0; k < n.factors.size(); ++k) {
    if (k) os << "*";
    print_factor(n.factors[k], os);
  }
}

bool negative_real(const Number& c) { return c.is_real() && c.value().real() < 0.0; }

void print(const ScalarExpr& e, std::ostream& os, bool wrap_sum) {
  const Node& n = e.node();
  switch (n.kind) {
    case NodeKind::Constant: {
      const bool needs = negative_real(n.value) && wrap_sum;
      if (needs) os << "(";
      os << n.value.str();
      if (needs) os << ")";
      return;
    }
    case NodeKind::Symbol:
      os << n.name;
      return;
    case NodeKind::Product:
      if (wrap_sum && negative_real(n.value)) os << "(";
      if (!n.value.is_one()) {
        if (n.value == Number(-1)) {
          os << "-";
        } else {
          os << n.value.str() << "*";
        }
      }
      print_product_body(n, os);
      if (wrap_sum && negative_real(n.value)) os << ")";
      return;
    case NodeKind::Sum: {
      if (wrap_sum) os << "(";
      bool first = true;
      for (const auto& t : n.terms) {
        Number c = t.coeff;
        if (!first) {
          if (negative_real(c)) {
            os << " - ";
            c = -c;
          } else {
            os << " + ";
          }
        } else if (negative_real(c)) {
          os << "-";
          c = -c;
        }
        first = false;
        if (!c.is_one()) os << c.str() << "*";
        print(t.expr, os, true);
      }
      if (!n.value.is_zero()) {
        if (negative_real(n.value)) {
          os << " - " << (-n.value).str();
        } else {
          os << " + " << n.value.str();
        }
      }
      if (wrap_sum) os << ")";
      return;
    }
    case NodeKind::LineIntegral: {
      os << "line_integral(";
      for (std::size_t k = 0; k < n.path.size(); ++k) {
        if (k) os << ", ";
        os << n.path[k].symbol << ": ";
        print(n.path[k].gradient, os, false);
      }
      os << ")";
      return;
    }
  }
}

}  // namespace

ScalarExpr conj(const ScalarExpr& e) {
  Rewriter rw;
  return conj_rec(e, rw);
}

ScalarExpr diff(const ScalarExpr& e, const std::string& symbol) {
  Rewriter rw;
  return diff_rec(e, symbol, rw);
}

ScalarExpr expand(const ScalarExpr& e) {
  Rewriter rw;
  return expand_rec(e, rw);
}

ScalarExpr substitute(const ScalarExpr& e, const std::map<std::string, ScalarExpr>& replacements) {
  if (replacements.empty()) return e;
  Rewriter rw;
  return subst_rec(e, replacements, rw);
}

ScalarExpr line_integral(std::vector<PathComponent> path) {
  if (path.empty()) return zero_expr();
  std::sort(path.begin(), path.end(), [](const auto& a, const auto& b) { return a.symbol < b.symbol; });
  auto node = std::make_shared<Node>();
  node->kind = NodeKind::LineIntegral;
  std::size_t h = 0x1E;
  for (const auto& c : path) {
    h = mix(mix(h, fnv(c.symbol)), c.gradient.hash());
    h = mix(h, std::hash<double>{}(c.reference));
  }
  node->hash = h;
  node->path = std::move(path);
  return ScalarExpr(std::move(node));
}

std::set<std::string> ScalarExpr::free_symbols() const {
  std::set<std::string> out;
  std::set<const Node*> seen;
  collect_symbols(*this, out, seen);
  return out;
}

std::string ScalarExpr::str() const {
  std::ostringstream os;
  print(*this, os, false);
  return os.str();
}

namespace vars {
std::string x(int i) { return "x" + std::to_string(i); }
std::string v(int i) { return "v" + std::to_string(i); }
std::string p(int i) { return "p" + std::to_string(i); }
bool is_phase_variable(const std::string& name) {
  if (name == t) return true;
  if (name.size() != 2) return false;
  return (name[0] == 'x' || name[0] == 'v' || name[0] == 'p') && name[1] >= '1' && name[1] <= '3';
}
}  // namespace vars

ScalarExpr x(int i) { return ScalarExpr::symbol(vars::x(i)); }
ScalarExpr v(int i) { return ScalarExpr::symbol(vars::v(i)); }
ScalarExpr p(int i) { return ScalarExpr::symbol(vars::p(i)); }
ScalarExpr time_symbol() { return ScalarExpr::symbol(vars::t); }
ScalarExpr param(const std::string& name) { return ScalarExpr::symbol(name); }

ScalarExpr speed_squared() { return v(1) * v(1) + v(2) * v(2) + v(3) * v(3); }

ScalarExpr lorentz_gamma() { return pow(ScalarExpr(1) - speed_squared(), Rational(-1, 2)); }

}  // namespace relkvn::symbolic
