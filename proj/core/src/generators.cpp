#include "relkvn/generators.hpp"

#include <algorithm>

#include "relkvn/error.hpp"
#include "relkvn/evaluate.hpp"

namespace relkvn::generators {

using algebra::commutator;
using algebra::DerivationMonomial;
using algebra::lambda_p;
using algebra::lambda_v;
using algebra::lambda_x;
using algebra::op_equal;
using algebra::symmetrize;
using symbolic::diff;
using symbolic::Number;
using symbolic::Rational;

namespace {

const ScalarExpr I = ScalarExpr::imaginary_unit();

int eps(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0;
  return ((j - i + 3) % 3 == 1) ? 1 : -1;
}

OperatorExpr scalar(const ScalarExpr& f, Representation rep = Representation::Velocity) {
  return OperatorExpr::scalar(f, rep);
}

ScalarExpr dot(const Vec3& a, const Vec3& b, int dims = 3) {
  ScalarExpr s(0);
  for (int k = 0; k < dims; ++k) s += a[k] * b[k];
  return s;
}

Vec3 velocity_symbols(int dims = 3) {
  Vec3 v{0, 0, 0};
  for (int k = 0; k < dims; ++k) v[k] = symbolic::v(k + 1);
  return v;
}

// (Σ_m c_m λ_m)_S for an operator of order ≤ 1: each term symmetrized separately.
OperatorExpr symmetrized_first_order(const OperatorExpr& a) {
  OperatorExpr out(a.representation());
  for (const auto& [m, c] : a.terms()) {
    if (m.is_identity()) {
      out += scalar(c, a.representation());
    } else {
      out += symmetrize(scalar(c, a.representation()), OperatorExpr::term(1, m, a.representation()));
    }
  }
  return out;
}

RelationResult check(const std::string& id, const OperatorExpr& lhs, const OperatorExpr& rhs, const std::string& lhs_text,
                     const std::string& rhs_text, const symbolic::ProbeOptions& options) {
  RelationResult r;
  r.id = id;
  r.lhs = lhs_text;
  r.rhs = rhs_text;
  try {
    const auto rep = op_equal(lhs, rhs, options);
    r.max_residual = rep.max_residual;
    r.trials = rep.trials;
    r.pass = rep.equal;
    if (!rep.equal) r.note = "worst monomial " + rep.worst_monomial;
  } catch (const Error& e) {
    r.pass = false;
    r.note = e.what();
  }
  return r;
}

}  // namespace

ForceField ForceField::constant_force(const ScalarExpr& F, int axis) {
  ForceField f;
  f.phi = -F * symbolic::x(axis);
  return f;
}

bool ForceField::has_vector_potential() const {
  return std::any_of(A.begin(), A.end(), [](const ScalarExpr& a) { return !a.is_zero(); });
}

bool ForceField::is_free() const {
  if (has_vector_potential()) return false;
  for (int k = 1; k <= 3; ++k)
    if (!diff(phi, symbolic::vars::x(k)).is_zero()) return false;
  return true;
}

Vec3 ForceField::E() const {
  Vec3 e;
  for (int k = 0; k < 3; ++k) e[k] = -diff(phi, symbolic::vars::x(k + 1));
  return e;
}

Vec3 ForceField::B() const {
  auto d = [&](int comp, int var) { return diff(A[comp], symbolic::vars::x(var + 1)); };
  return {d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1)};
}

Vec3 ForceField::force(const Vec3& w) const {
  const Vec3 e = E();
  if (!has_vector_potential()) return e;
  const Vec3 b = B();
  return {e[0] + w[1] * b[2] - w[2] * b[1], e[1] + w[2] * b[0] - w[0] * b[2], e[2] + w[0] * b[1] - w[1] * b[0]};
}

std::vector<std::pair<std::string, OperatorExpr>> GeneratorSet::generators() const {
  std::vector<std::pair<std::string, OperatorExpr>> out;
  for (int i = 0; i < 3; ++i) out.emplace_back("J" + std::to_string(i + 1), J[i]);
  for (int i = 0; i < 3; ++i) out.emplace_back("K" + std::to_string(i + 1), K[i]);
  for (int i = 0; i < 3; ++i) out.emplace_back("l" + std::to_string(i + 1), lambda_r[i]);
  out.emplace_back("L", L);
  return out;
}

ScalarExpr speed_squared(int dims) {
  ScalarExpr s(0);
  for (int k = 1; k <= dims; ++k) s += symbolic::v(k) * symbolic::v(k);
  return s;
}

ScalarExpr gamma(int dims) { return symbolic::pow(1 - speed_squared(dims), Rational(-1, 2)); }

OperatorExpr build_free_liouvillian(int dims) {
  OperatorExpr L;
  for (int i = 1; i <= dims; ++i) L += algebra::V(i) * lambda_x(i);
  return L;
}

OperatorExpr build_interacting_liouvillian(const ScalarExpr& m0, const ForceField& field, int dims) {
  const Vec3 v = velocity_symbols(dims);
  Vec3 F = field.force(v);
  std::map<std::string, ScalarExpr> frozen;
  for (int k = dims + 1; k <= 3; ++k) frozen[symbolic::vars::v(k)] = 0;
  if (!frozen.empty())
    for (auto& f : F) f = symbolic::substitute(f, frozen);
  const ScalarExpr vf = dot(v, F, dims);
  const ScalarExpr inv_gamma = symbolic::sqrt(1 - speed_squared(dims));
  OperatorExpr L = build_free_liouvillian(dims);
  for (int i = 0; i < dims; ++i) {
    const ScalarExpr c = inv_gamma * (F[i] - vf * v[i]) / m0;
    if (!c.is_zero()) L += symmetrize(scalar(c), lambda_v(i + 1));
  }
  return L;
}

GeneratorSet build_free_generators(const ScalarExpr& m0, const ScalarExpr& t) {
  GeneratorSet g;
  g.rep = Representation::Velocity;
  g.name = "free/velocity";
  g.m0 = m0;
  g.t = t;
  for (int i = 0; i < 3; ++i) {
    g.X[i] = algebra::X(i + 1);
    g.W[i] = algebra::V(i + 1);
    g.lambda_w[i] = lambda_v(i + 1);
    g.lambda_r[i] = lambda_x(i + 1);
  }
  g.L = build_free_liouvillian();
  for (int i = 0; i < 3; ++i) {
    OperatorExpr j;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        if (int e = eps(i, a, b)) j += ScalarExpr(e) * (g.X[a] * g.lambda_r[b] + g.W[a] * g.lambda_w[b]);
    g.J[i] = j;
  }
  for (int i = 0; i < 3; ++i) {
    OperatorExpr k = symmetrize(g.X[i], g.L);
    for (int j = 0; j < 3; ++j) {
      const ScalarExpr c = ScalarExpr(i == j ? 1 : 0) - symbolic::v(i + 1) * symbolic::v(j + 1);
      k -= symmetrize(scalar(c), g.lambda_w[j]);
    }
    k -= t * g.lambda_r[i];
    g.K[i] = k;
  }
  return g;
}

GeneratorSet build_interacting_generators(const ScalarExpr& m0, const ForceField& field, const ScalarExpr& t) {
  GeneratorSet g = build_free_generators(m0, t);
  g.name = "interacting/velocity";
  g.L = build_interacting_liouvillian(m0, field);
  return g;
}

GeneratorSet mutate(GeneratorSet gen, const std::string& what) {
  if (what.empty() || what == "none") return gen;
  if (what == "K") {
    const OperatorExpr q = gen.X[0] + gen.X[1] + gen.X[2];
    for (auto& k : gen.K) k += q;
    gen.name += "+mutate(K)";
    return gen;
  }
  if (what == "L") {
    if (gen.rep == Representation::Velocity) {
      gen.L = algebra::V(1) * lambda_x(1);
    } else {
      gen.L = scalar(symbolic::p(1) / momentum_energy(gen.m0, {}), gen.rep) * gen.lambda_r[0];
    }
    gen.name += "+mutate(L)";
    return gen;
  }
  throw ConfigError("unknown mutation '" + what + "' (expected K or L)");
}

VerificationReport verify_poincare_closure(const GeneratorSet& gen, const symbolic::ProbeOptions& options,
                                           ClosureScope scope) {
  VerificationReport report;
  report.suite = "poincare-closure " + gen.name;
  const auto gens = gen.generators();
  const Representation rep = gen.rep;
  auto group = [](int a) { return a < 3 ? 0 : a < 6 ? 1 : a < 9 ? 2 : 3; };
  const std::string names[] = {"J", "K", "l", "L"};
  for (int a = 0; a < 10; ++a) {
    for (int b = a + 1; b < 10; ++b) {
      const int ga = group(a), gb = group(b);
      const int i = a % 3, j = b % 3;
      OperatorExpr rhs(rep);
      std::string rhs_text = "0";
      auto eps_rhs = [&](int target_group, int sign) {
        for (int k = 0; k < 3; ++k) {
          if (int e = sign * eps(i, j, k)) {
            rhs = ScalarExpr(e) * I * gens[static_cast<std::size_t>(3 * target_group + k)].second;
            rhs_text = (e < 0 ? "-i*" : "i*") + names[target_group] + std::to_string(k + 1);
          }
        }
      };
      if (ga == 0 && gb < 3) {
        eps_rhs(gb, 1);  // [J,J]=iεJ, [J,K]=iεK, [J,λ]=iελ
      } else if (ga == 1 && gb == 1) {
        eps_rhs(0, -1);
      } else if (ga == 1 && gb == 2) {
        if (i == j) {
          rhs = I * gen.L;
          rhs_text = "i*L";
        }
      } else if (ga == 1 && gb == 3) {
        rhs = I * gen.lambda_r[i];
        rhs_text = "i*l" + std::to_string(i + 1);
      }
      const std::string id = "[" + gens[a].first + "," + gens[b].first + "]";
      RelationResult r;
      try {
        r = check(id, commutator(gens[a].second, gens[b].second), rhs, id, rhs_text, options);
      } catch (const Error& e) {
        r.id = id;
        r.lhs = id;
        r.rhs = rhs_text;
        r.note = e.what();
      }
      if (scope == ClosureScope::WithoutLiouvillian && (gb == 3 || (ga == 1 && gb == 2))) r.informational = true;
      report.relations.push_back(std::move(r));
    }
  }
  return report;
}

VerificationReport verify_force_equation(const ScalarExpr& m0, const ForceField& field,
                                         const symbolic::ProbeOptions& options, int dims) {
  VerificationReport report;
  report.suite = "force-equation";
  const OperatorExpr L = build_interacting_liouvillian(m0, field, dims);
  Vec3 F = field.force(velocity_symbols(dims));
  std::map<std::string, ScalarExpr> frozen;
  for (int k = dims + 1; k <= 3; ++k) frozen[symbolic::vars::v(k)] = 0;
  for (int i = 0; i < dims; ++i) {
    const ScalarExpr momentum = m0 * gamma(dims) * symbolic::v(i + 1);
    const OperatorExpr lhs = I * commutator(L, scalar(momentum));
    const ScalarExpr f = frozen.empty() ? F[i] : symbolic::substitute(F[i], frozen);
    const std::string n = std::to_string(i + 1);
    report.relations.push_back(
        check("force" + n, lhs, scalar(f), "i[L, m0*gamma*V" + n + "]", "F" + n + " = " + f.str(), options));
  }
  return report;
}

LagrangianStructure build_lagrangian_structure(const ScalarExpr& m0, const ForceField& field) {
  LagrangianStructure s;
  s.kinetic_coenergy = m0 * (1 - symbolic::sqrt(1 - speed_squared()));
  ScalarExpr u = field.phi;
  for (int k = 0; k < 3; ++k) u -= symbolic::v(k + 1) * field.A[k];
  s.U = scalar(u);
  s.lagrangian = scalar(s.kinetic_coenergy) - s.U;
  for (int k = 0; k < 3; ++k) s.P[k] = I * commutator(lambda_v(k + 1), s.lagrangian);
  return s;
}

std::array<OperatorExpr, 3> apply_euler_lagrange(const OperatorExpr& lagrangian, const OperatorExpr& L) {
  if (!lagrangian.is_multiplicative()) throw Error("Euler-Lagrange operator needs a multiplicative Lagrangian");
  const Representation rep = lagrangian.representation();
  std::array<OperatorExpr, 3> out;
  for (int a = 0; a < 3; ++a) {
    out[a] = -commutator(L, commutator(lambda_v(a + 1), lagrangian)) -
             I * commutator(lambda_x(a + 1, rep), lagrangian);
  }
  return out;
}

VerificationReport verify_canonical_momentum(const ScalarExpr& m0, const ForceField& field,
                                             const symbolic::ProbeOptions& options) {
  VerificationReport report;
  report.suite = "canonical-momentum";
  const auto s = build_lagrangian_structure(m0, field);
  const ScalarExpr g = gamma();
  for (int i = 0; i < 3; ++i) {
    ScalarExpr expected = m0 * g * symbolic::v(i + 1) + field.A[i];
    const std::string n = std::to_string(i + 1);
    report.relations.push_back(check("P" + n, s.P[i], scalar(expected), "i[lv" + n + ", Lagrangian]",
                                     "m0*gamma*V" + n + " + A" + n, options));
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const std::string id = "[P" + std::to_string(i + 1) + ",Lv" + std::to_string(j + 1) + "]";
      const OperatorExpr lhs = commutator(s.P[i], lambda_v(j + 1));
      const ScalarExpr vv = symbolic::v(i + 1) * symbolic::v(j + 1);
      const ScalarExpr delta(i == j ? 1 : 0);
      const ScalarExpr derived = I * m0 * g * (delta + g * g * vv);
      report.relations.push_back(check(id, lhs, scalar(derived), id, "i*m0*gamma*(delta + gamma^2*Vi*Vj)", options));
      RelationResult printed = check(id + "/printed", lhs, scalar(I * m0 * g * (delta + vv * g)), id,
                                     "i*m0*gamma*(delta + Vi*Vj*gamma)", options);
      printed.informational = true;
      printed.note = printed.pass ? "printed gamma power agrees" : "printed gamma power disagrees";
      report.relations.push_back(std::move(printed));
    }
  }
  return report;
}

ScalarExpr momentum_energy(const ScalarExpr& m0, const ForceField& field) {
  ScalarExpr s = m0 * m0;
  for (int k = 0; k < 3; ++k) {
    const ScalarExpr pi = symbolic::p(k + 1) - field.A[k];
    s += pi * pi;
  }
  return symbolic::sqrt(s);
}

namespace {

constexpr Representation kMom = Representation::Momentum;

GeneratorSet momentum_geometry(const ScalarExpr& m0, const ScalarExpr& t) {
  GeneratorSet g;
  g.rep = kMom;
  g.name = "free/momentum";
  g.m0 = m0;
  g.t = t;
  for (int i = 0; i < 3; ++i) {
    g.X[i] = algebra::X(i + 1, kMom);
    g.W[i] = algebra::P(i + 1);
    g.lambda_w[i] = lambda_p(i + 1);
    g.lambda_r[i] = lambda_x(i + 1, kMom);
  }
  const ScalarExpr h = momentum_energy(m0, {});
  OperatorExpr lfree(kMom);
  for (int i = 0; i < 3; ++i) lfree += scalar(symbolic::p(i + 1) / h, kMom) * g.lambda_r[i];
  g.L = lfree;
  for (int i = 0; i < 3; ++i) {
    OperatorExpr j(kMom);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        if (int e = eps(i, a, b)) j += ScalarExpr(e) * (g.X[a] * g.lambda_r[b] + g.W[a] * g.lambda_w[b]);
    g.J[i] = j;
    g.K[i] = symmetrize(g.X[i], lfree) - symmetrize(scalar(h, kMom), g.lambda_w[i]) - t * g.lambda_r[i];
  }
  return g;
}

Vec3 kinetic_velocity(const ScalarExpr& m0, const ForceField& field) {
  const ScalarExpr h = momentum_energy(m0, field);
  Vec3 w;
  for (int k = 0; k < 3; ++k) w[k] = (symbolic::p(k + 1) - field.A[k]) / h;
  return w;
}

}  // namespace

GeneratorSet build_momentum_generators(const ScalarExpr& m0, const ScalarExpr& t) { return momentum_geometry(m0, t); }

GeneratorSet build_momentum_generators(const ScalarExpr& m0, const ForceField& field, const ScalarExpr& t) {
  GeneratorSet g = momentum_geometry(m0, t);
  if (field.is_free()) return g;
  g.name = "interacting/momentum";
  g.L = field.has_vector_potential() ? momentum_liouvillian_printed(m0, field)
                                     : momentum_liouvillian_electric(m0, field);
  return g;
}

OperatorExpr momentum_liouvillian_electric(const ScalarExpr& m0, const ForceField& field) {
  const ScalarExpr h = momentum_energy(m0, field);
  const Vec3 F = field.force(kinetic_velocity(m0, field));
  OperatorExpr L(kMom);
  for (int i = 0; i < 3; ++i) {
    L += scalar(symbolic::p(i + 1) / h, kMom) * lambda_x(i + 1, kMom);
    if (!F[i].is_zero()) L += symmetrize(scalar(F[i], kMom), lambda_p(i + 1));
  }
  return L;
}

OperatorExpr momentum_liouvillian_printed(const ScalarExpr& m0, const ForceField& field) {
  const ScalarExpr h = momentum_energy(m0, field);
  const ScalarExpr h_inv = 1 / h;
  const Vec3 F = field.force(kinetic_velocity(m0, field));
  Vec3 P, Pi;
  for (int k = 0; k < 3; ++k) {
    P[k] = symbolic::p(k + 1);
    Pi[k] = P[k] - field.A[k];
  }
  const ScalarExpr fp = dot(F, P);
  const ScalarExpr fa = dot(F, field.A);
  OperatorExpr raw(kMom);
  for (int i = 0; i < 3; ++i) {
    raw += scalar(h_inv * Pi[i], kMom) * lambda_x(i + 1, kMom);
    for (int j = 0; j < 3; ++j) {
      const ScalarExpr grad = diff(field.A[j], symbolic::vars::x(i + 1));
      raw += scalar(h_inv * Pi[i] * grad, kMom) * lambda_p(j + 1);
    }
    raw += scalar(F[i], kMom) * lambda_p(i + 1);
  }
  for (int i = 0; i < 3; ++i) {
    const ScalarExpr brace = field.A[i] * fp + Pi[i] * fa;
    for (int j = 0; j < 3; ++j) {
      const ScalarExpr delta(i == j ? 1 : 0);
      const ScalarExpr m = delta - P[i] * field.A[j] - P[j] * field.A[i] + field.A[i] * field.A[j];
      raw -= scalar(h_inv * h_inv * brace * m, kMom) * lambda_p(j + 1);
    }
  }
  return symmetrized_first_order(raw);
}

OperatorExpr momentum_liouvillian_transported(const ScalarExpr& m0, const ForceField& field) {
  const Vec3 w = kinetic_velocity(m0, field);
  const Vec3 e = field.E();
  OperatorExpr raw(kMom);
  for (int j = 0; j < 3; ++j) {
    raw += scalar(w[j], kMom) * lambda_x(j + 1, kMom);
    ScalarExpr c = e[j];
    for (int i = 0; i < 3; ++i) c += w[i] * diff(field.A[i], symbolic::vars::x(j + 1));
    raw += scalar(c, kMom) * lambda_p(j + 1);
  }
  return symmetrized_first_order(raw);
}

std::optional<ScalarExpr> poisson_correspondence(const OperatorExpr& op, const symbolic::ProbeOptions& options) {
  if (op.representation() != kMom || op.order() > 1 || op.is_multiplicative()) return std::nullopt;
  // G = (∂H/∂x, ∂H/∂p) over y = (x1..3, p1..3)
  std::array<ScalarExpr, 6> G;
  for (int k = 0; k < 3; ++k) {
    G[k] = -I * op.coefficient(DerivationMonomial::dw(k + 1));
    G[k + 3] = I * op.coefficient(DerivationMonomial::dx(k + 1));
  }
  std::vector<ScalarExpr> lhs, rhs;
  for (int a = 0; a < 6; ++a) {
    lhs.push_back(G[a]);
    rhs.push_back(symbolic::conj(G[a]));
    for (int b = a + 1; b < 6; ++b) {
      lhs.push_back(diff(G[a], algebra::derivation_symbol(kMom, b)));
      rhs.push_back(diff(G[b], algebra::derivation_symbol(kMom, a)));
    }
  }
  lhs.push_back(op.scalar_part());
  rhs.push_back(0);
  for (std::size_t k = 0; k < lhs.size(); ++k) {
    if (!symbolic::equal_numeric(lhs[k], rhs[k], options).equal) return std::nullopt;
  }
  std::vector<symbolic::PathComponent> path;
  for (int a = 0; a < 6; ++a) path.push_back({algebra::derivation_symbol(kMom, a), G[a], 0.0});
  return symbolic::line_integral(std::move(path));
}

}  // namespace relkvn::generators
