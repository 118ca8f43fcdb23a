#include "relkvn/operator_expr.hpp"

#include <algorithm>
#include <sstream>

#include "relkvn/error.hpp"
#include "relkvn/evaluate.hpp"

namespace relkvn::algebra {

using symbolic::Number;
using symbolic::Rational;

const char* to_string(Representation rep) { return rep == Representation::Velocity ? "velocity" : "momentum"; }

DerivationMonomial DerivationMonomial::dx(int i) {
  DerivationMonomial m;
  m.a.at(static_cast<std::size_t>(i - 1)) = 1;
  return m;
}

DerivationMonomial DerivationMonomial::dw(int i) {
  DerivationMonomial m;
  m.b.at(static_cast<std::size_t>(i - 1)) = 1;
  return m;
}

int DerivationMonomial::order() const noexcept {
  int n = 0;
  for (int k = 0; k < 6; ++k) n += at(k);
  return n;
}

std::string DerivationMonomial::str(Representation rep) const {
  static const char* vel[6] = {"Lx1", "Lx2", "Lx3", "Lv1", "Lv2", "Lv3"};
  static const char* mom[6] = {"Lxp1", "Lxp2", "Lxp3", "Lp1", "Lp2", "Lp3"};
  const char** names = rep == Representation::Velocity ? vel : mom;
  std::string out;
  for (int k = 0; k < 6; ++k) {
    if (at(k) == 0) continue;
    if (!out.empty()) out += "*";
    out += names[k];
    if (at(k) > 1) out += "^" + std::to_string(at(k));
  }
  return out.empty() ? "1" : out;
}

const std::string& derivation_symbol(Representation rep, int k) {
  static const std::string vel[6] = {"x1", "x2", "x3", "v1", "v2", "v3"};
  static const std::string mom[6] = {"x1", "x2", "x3", "p1", "p2", "p3"};
  return rep == Representation::Velocity ? vel[k] : mom[k];
}

OperatorExpr OperatorExpr::scalar(const ScalarExpr& f, Representation rep) {
  OperatorExpr out(rep);
  out.add({}, f);
  return out;
}

OperatorExpr OperatorExpr::term(const ScalarExpr& coeff, const DerivationMonomial& m, Representation rep) {
  OperatorExpr out(rep);
  out.add(m, coeff);
  return out;
}

bool OperatorExpr::is_multiplicative() const noexcept {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_identity());
}

int OperatorExpr::order() const noexcept {
  int n = 0;
  for (const auto& [m, c] : terms_) n = std::max(n, m.order());
  return n;
}

ScalarExpr OperatorExpr::coefficient(const DerivationMonomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? ScalarExpr(0) : it->second;
}

void OperatorExpr::add(const DerivationMonomial& m, const ScalarExpr& c) {
  if (c.is_zero()) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, c);
    return;
  }
  it->second = it->second + c;
  if (it->second.is_zero()) terms_.erase(it);
}

std::string OperatorExpr::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    // ∂^α = i^|α| λ^α
    const ScalarExpr lc = c * ScalarExpr(Number::imaginary_unit().pow(m.order()));
    if (!first) os << " + ";
    first = false;
    if (m.is_identity()) {
      os << lc.str();
    } else if (lc.is_one()) {
      os << m.str(rep_);
    } else {
      os << "(" << lc.str() << ")*" << m.str(rep_);
    }
  }
  return os.str();
}

namespace {

void require_same(const OperatorExpr& a, const OperatorExpr& b) {
  if (a.representation() != b.representation()) {
    throw RepresentationMismatch(std::string("cannot combine ") + to_string(a.representation()) + " and " +
                                 to_string(b.representation()) + " operators");
  }
}

std::int64_t binomial(int n, int k) {
  std::int64_t r = 1;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

}  // namespace

OperatorExpr operator+(const OperatorExpr& a, const OperatorExpr& b) {
  require_same(a, b);
  OperatorExpr out = a;
  for (const auto& [m, c] : b.terms()) out.add(m, c);
  return out;
}

OperatorExpr operator-(const OperatorExpr& a) {
  OperatorExpr out(a.representation());
  for (const auto& [m, c] : a.terms()) out.add(m, -c);
  return out;
}

OperatorExpr operator-(const OperatorExpr& a, const OperatorExpr& b) { return a + (-b); }

OperatorExpr operator*(const ScalarExpr& f, const OperatorExpr& a) {
  OperatorExpr out(a.representation());
  if (f.is_zero()) return out;
  for (const auto& [m, c] : a.terms()) out.add(m, f * c);
  return out;
}

OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b) { return compose(a, b); }

OperatorExpr compose(const OperatorExpr& a, const OperatorExpr& b, int cap) {
  require_same(a, b);
  const Representation rep = a.representation();
  OperatorExpr out(rep);
  for (const auto& [alpha, f] : a.terms()) {
    for (const auto& [beta, g] : b.terms()) {
      // (f ∂^α)(g ∂^β) = f Σ_{γ≤α} C(α,γ) (∂^γ g) ∂^{α-γ+β}
      DerivationMonomial gamma;
      for (;;) {
        ScalarExpr dg = g;
        std::int64_t weight = 1;
        for (int k = 0; k < 6 && !dg.is_zero(); ++k) {
          for (int r = 0; r < gamma.at(k) && !dg.is_zero(); ++r) dg = symbolic::diff(dg, derivation_symbol(rep, k));
          weight *= binomial(alpha.at(k), gamma.at(k));
        }
        if (!dg.is_zero()) {
          DerivationMonomial m;
          for (int k = 0; k < 6; ++k) m.at(k) = static_cast<std::uint8_t>(alpha.at(k) - gamma.at(k) + beta.at(k));
          if (m.order() > cap) throw OrderCapExceeded(m.order(), cap);
          out.add(m, ScalarExpr(weight) * f * dg);
        }
        int k = 0;
        while (k < 6 && gamma.at(k) == alpha.at(k)) gamma.at(k++) = 0;
        if (k == 6) break;
        ++gamma.at(k);
      }
    }
  }
  return out;
}

OperatorExpr commutator(const OperatorExpr& a, const OperatorExpr& b, int cap) {
  return compose(a, b, cap) - compose(b, a, cap);
}

OperatorExpr symmetrize(const OperatorExpr& a, const OperatorExpr& b, int cap) {
  return ScalarExpr(Number(Rational(1, 2))) * (compose(a, b, cap) + compose(b, a, cap));
}

OperatorExpr adjoint(const OperatorExpr& a, int cap) {
  const Representation rep = a.representation();
  OperatorExpr out(rep);
  for (const auto& [m, c] : a.terms()) {
    // (f ∂^α)† = (-1)^|α| ∂^α ∘ conj(f)
    const ScalarExpr sign = (m.order() % 2 == 0) ? ScalarExpr(1) : ScalarExpr(-1);
    out += compose(OperatorExpr::term(sign, m, rep), OperatorExpr::scalar(symbolic::conj(c), rep), cap);
  }
  return out;
}

OperatorExpr map_coefficients(const OperatorExpr& a, const std::function<ScalarExpr(const ScalarExpr&)>& f) {
  OperatorExpr out(a.representation());
  for (const auto& [m, c] : a.terms()) out.add(m, f(c));
  return out;
}

OpEqualReport op_equal(const OperatorExpr& a, const OperatorExpr& b, const symbolic::ProbeOptions& options) {
  require_same(a, b);
  std::vector<DerivationMonomial> monomials;
  std::vector<ScalarExpr> roots;
  std::set<std::string> symbols;
  auto collect = [&](const DerivationMonomial& m) {
    if (std::find(monomials.begin(), monomials.end(), m) != monomials.end()) return;
    monomials.push_back(m);
    for (const ScalarExpr& c : {a.coefficient(m), b.coefficient(m)}) {
      roots.push_back(c);
      const auto s = c.free_symbols();
      symbols.insert(s.begin(), s.end());
    }
  };
  for (const auto& [m, c] : a.terms()) collect(m);
  for (const auto& [m, c] : b.terms()) collect(m);

  OpEqualReport report;
  if (monomials.empty()) return report;
  std::vector<std::string> slots(symbols.begin(), symbols.end());
  const symbolic::Tape tape(roots, slots);
  symbolic::Tape::Workspace ws;
  std::vector<std::complex<double>> out(roots.size());
  std::vector<double> per_monomial(monomials.size(), 0.0);
  const auto probed = symbolic::probe(symbols, options, [&](const symbolic::SamplePoint& pt) {
    tape.evaluate(tape.slot_values(pt), ws, out);
    double worst = 0.0;
    std::vector<double> r(monomials.size());
    for (std::size_t k = 0; k < monomials.size(); ++k) {
      r[k] = symbolic::residual(out[2 * k], out[2 * k + 1]);
      worst = std::max(worst, r[k]);
    }
    for (std::size_t k = 0; k < monomials.size(); ++k) per_monomial[k] = std::max(per_monomial[k], r[k]);
    return worst;
  });
  report.equal = probed.equal;
  report.max_residual = probed.max_residual;
  report.trials = probed.trials;
  report.resamples = probed.resamples;
  report.worst_point = probed.worst;
  const auto worst = std::max_element(per_monomial.begin(), per_monomial.end()) - per_monomial.begin();
  report.worst_monomial = monomials[static_cast<std::size_t>(worst)].str(a.representation());
  return report;
}

OpEqualReport op_equal(const OperatorExpr& a, const OperatorExpr& b, double tol, std::uint64_t seed) {
  symbolic::ProbeOptions o;
  o.tol = tol;
  o.seed = seed;
  return op_equal(a, b, o);
}

bool is_hermitian(const OperatorExpr& a, const symbolic::ProbeOptions& options) {
  return op_equal(a, adjoint(a), options).equal;
}

bool is_hermitian(const OperatorExpr& a, double tol, std::uint64_t seed) {
  symbolic::ProbeOptions o;
  o.tol = tol;
  o.seed = seed;
  return is_hermitian(a, o);
}

OperatorExpr identity(Representation rep) { return OperatorExpr::scalar(1, rep); }

OperatorExpr X(int i, Representation rep) { return OperatorExpr::scalar(symbolic::x(i), rep); }

OperatorExpr V(int i) { return OperatorExpr::scalar(symbolic::v(i), Representation::Velocity); }

OperatorExpr P(int i) { return OperatorExpr::scalar(symbolic::p(i), Representation::Momentum); }

OperatorExpr lambda_x(int i, Representation rep) {
  return OperatorExpr::term(-ScalarExpr::imaginary_unit(), DerivationMonomial::dx(i), rep);
}

OperatorExpr lambda_v(int i) {
  return OperatorExpr::term(-ScalarExpr::imaginary_unit(), DerivationMonomial::dw(i), Representation::Velocity);
}

OperatorExpr lambda_p(int i) {
  return OperatorExpr::term(-ScalarExpr::imaginary_unit(), DerivationMonomial::dw(i), Representation::Momentum);
}

}  // namespace relkvn::algebra
