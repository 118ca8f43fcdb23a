#include "relkvn/series.hpp"

#include <cmath>
#include <numbers>

#include "relkvn/error.hpp"
#include "relkvn/evaluate.hpp"

namespace relkvn::series {

using algebra::commutator;
using algebra::lambda_p;
using algebra::lambda_v;
using algebra::lambda_x;
using algebra::op_equal;
using algebra::Representation;
using algebra::symmetrize;
using symbolic::Number;
using symbolic::Rational;
using symbolic::SamplePoint;
using cplx = std::complex<double>;

namespace {

const ScalarExpr I = ScalarExpr::imaginary_unit();

OperatorExpr scalar(const ScalarExpr& f, Representation rep = Representation::Velocity) {
  return OperatorExpr::scalar(f, rep);
}

RelationResult row(const std::string& id, const OperatorExpr& lhs, const OperatorExpr& rhs, const std::string& rhs_text,
                   const symbolic::ProbeOptions& options) {
  RelationResult r;
  r.id = id;
  r.lhs = lhs.str();
  r.rhs = rhs_text;
  try {
    const auto rep = op_equal(lhs, rhs, options);
    r.max_residual = rep.max_residual;
    r.trials = rep.trials;
    r.pass = rep.equal;
    if (!rep.equal) r.note = "worst monomial " + rep.worst_monomial;
  } catch (const Error& e) {
    r.note = e.what();
  }
  return r;
}

ScalarExpr speed_squared() { return symbolic::speed_squared(); }

double value(const SamplePoint& pt, const std::string& name) {
  auto v = pt.get(name);
  if (!v) throw UnassignedVariable(name);
  return *v;
}

}  // namespace

OperatorExpr AdjointSeries::partial_sum(int k, const ScalarExpr& param) const {
  OperatorExpr out(Y.representation());
  ScalarExpr weight(1);
  for (int n = 0; n <= k && n < static_cast<int>(terms.size()); ++n) {
    out += weight * terms[static_cast<std::size_t>(n)];
    weight = weight * param;
  }
  return out;
}

AdjointSeries adjoint_series(const OperatorExpr& X, const OperatorExpr& Y, int order, int cap) {
  if (order < 0) throw Error("series order must be nonnegative");
  AdjointSeries s{X, Y, order, {}};
  s.terms.push_back(Y);
  OperatorExpr nested = Y;
  for (int n = 1; n <= order; ++n) {
    nested = commutator(X, nested, cap);
    s.terms.push_back(ScalarExpr(Number(Rational(1, n))) * nested);
    nested = s.terms.back();
  }
  return s;
}

OperatorExpr c1_exponent() {
  OperatorExpr out;
  const ScalarExpr v2 = speed_squared();
  for (int k = 1; k <= 3; ++k) out += symmetrize(scalar(v2 * symbolic::v(k)), lambda_v(k));
  return (I / 2) * out;
}

OperatorExpr c2_exponent(const ForceField& field) {
  OperatorExpr out(Representation::Momentum);
  for (int k = 0; k < 3; ++k) out += scalar(field.A[k], Representation::Momentum) * lambda_p(k + 1);
  return I * out;
}

Rational velocity_series_coefficient(int n) {
  Rational c(1);
  for (int k = 1; k <= n; ++k) c = c * Rational(2 * k - 1, 2 * k);
  return c;
}

Rational inverse_gamma_coefficient(int n) {
  // sqrt(1-u) = Σ binom(1/2, n) (-u)^n
  Rational c(1);
  for (int k = 0; k < n; ++k) c = c * (Rational(1, 2) - Rational(k)) / Rational(k + 1) * Rational(-1);
  return c;
}

VerificationReport verify_c1_on_velocity(const ScalarExpr& m0, int order, const symbolic::ProbeOptions& options) {
  VerificationReport report;
  report.suite = "c1-momentum";
  const OperatorExpr x1 = c1_exponent();
  report.relations.push_back(row("exponent anti-hermitian", algebra::adjoint(x1), -x1, "-X", options));
  const ScalarExpr v2 = speed_squared();
  for (int i = 1; i <= 3; ++i) {
    const auto s = adjoint_series(x1, m0 * algebra::V(i), order);
    ScalarExpr vpow(1);
    for (int n = 0; n <= order; ++n) {
      const Rational c = velocity_series_coefficient(n);
      const ScalarExpr expected = ScalarExpr(Number(c)) * m0 * symbolic::v(i) * vpow;
      auto r = row("V" + std::to_string(i) + "/order" + std::to_string(n), s.terms[static_cast<std::size_t>(n)],
                   scalar(expected), "(" + c.str() + ")*m0*V" + std::to_string(i) + "*V^" + std::to_string(2 * n),
                   options);
      r.note = "coefficient " + c.str() + (r.note.empty() ? "" : "; " + r.note);
      report.relations.push_back(std::move(r));
      vpow = vpow * v2;
    }
  }
  return report;
}

VerificationReport verify_c1_on_lambda(const ScalarExpr& m0, int order, const symbolic::ProbeOptions& options) {
  VerificationReport report;
  report.suite = "c1-lambda";
  const OperatorExpr x1 = c1_exponent();
  const ScalarExpr v2 = speed_squared();
  for (int i = 1; i <= 3; ++i) {
    const auto s = adjoint_series(x1, (1 / m0) * lambda_v(i), order);
    for (int n = 0; n <= order; ++n) {
      // degree-2n part of (1/m0)[γ⁻¹(λv_i − V_i V_k λv_k)]_S
      const Rational cn = inverse_gamma_coefficient(n);
      OperatorExpr expected = symmetrize(scalar(ScalarExpr(Number(cn)) * symbolic::pow(v2, Rational(n))), lambda_v(i));
      if (n > 0) {
        const ScalarExpr c_prev(Number(inverse_gamma_coefficient(n - 1)));
        for (int k = 1; k <= 3; ++k) {
          const ScalarExpr f = c_prev * symbolic::pow(v2, Rational(n - 1)) * symbolic::v(i) * symbolic::v(k);
          expected -= symmetrize(scalar(f), lambda_v(k));
        }
      }
      expected = (1 / m0) * expected;
      report.relations.push_back(row("Lv" + std::to_string(i) + "/degree" + std::to_string(2 * n),
                                     s.terms[static_cast<std::size_t>(n)], expected,
                                     "degree-" + std::to_string(2 * n) + " part of (1/m0)[ginv(Lv - V V.Lv)]_S",
                                     options));
    }
  }
  return report;
}

VerificationReport verify_c2(const ForceField& field, const symbolic::ProbeOptions& options) {
  VerificationReport report;
  report.suite = "c2";
  constexpr Representation mom = Representation::Momentum;
  const OperatorExpr x2 = c2_exponent(field);
  const OperatorExpr zero(mom);
  for (int i = 1; i <= 3; ++i) {
    const std::string n = std::to_string(i);
    const auto pi = adjoint_series(x2, algebra::P(i), 2);
    report.relations.push_back(row("Pi" + n + "/order1", pi.terms[1], scalar(field.A[i - 1], mom), "A" + n, options));
    report.relations.push_back(row("Pi" + n + "/order2", pi.terms[2], zero, "0", options));
    const auto lx = adjoint_series(x2, lambda_x(i, mom), 2);
    OperatorExpr shift(mom);
    for (int j = 1; j <= 3; ++j) {
      shift -= scalar(symbolic::diff(field.A[j - 1], symbolic::vars::x(i)), mom) * lambda_p(j);
    }
    report.relations.push_back(row("Lxp" + n + "/order1", lx.terms[1], shift, "-dA_j/dx" + n + " Lp_j", options));
    report.relations.push_back(row("Lxp" + n + "/order2", lx.terms[2], zero, "0", options));
    report.relations.push_back(
        row("Lp" + n + "/order1", adjoint_series(x2, lambda_p(i), 1).terms[1], zero, "0", options));
    report.relations.push_back(
        row("X" + n + "/order1", adjoint_series(x2, algebra::X(i, mom), 1).terms[1], zero, "0", options));
  }
  return report;
}

VerificationReport verify_canonical_map(const ScalarExpr& m0, const ForceField& field, int order,
                                        const symbolic::ProbeOptions& options) {
  VerificationReport report;
  report.suite = "canonical-map";
  const ScalarExpr g = generators::gamma();
  const ScalarExpr inv_g = symbolic::sqrt(1 - speed_squared());
  std::vector<std::pair<std::string, OperatorExpr>> ops;
  std::array<OperatorExpr, 3> lp;
  for (int i = 1; i <= 3; ++i) {
    OperatorExpr l;
    for (int k = 1; k <= 3; ++k) {
      const ScalarExpr c = inv_g * (ScalarExpr(i == k ? 1 : 0) - symbolic::v(i) * symbolic::v(k));
      l += symmetrize(scalar(c), lambda_v(k));
    }
    lp[i - 1] = (1 / m0) * l;
  }
  for (int i = 1; i <= 3; ++i) ops.emplace_back("X" + std::to_string(i), algebra::X(i));
  for (int i = 1; i <= 3; ++i)
    ops.emplace_back("P" + std::to_string(i), scalar(m0 * g * symbolic::v(i) + field.A[i - 1]));
  for (int i = 1; i <= 3; ++i) {
    OperatorExpr l = lambda_x(i);
    for (int j = 1; j <= 3; ++j) l -= scalar(symbolic::diff(field.A[j - 1], symbolic::vars::x(i))) * lp[j - 1];
    ops.emplace_back("Lxp" + std::to_string(i), l);
  }
  for (int i = 1; i <= 3; ++i) ops.emplace_back("Lp" + std::to_string(i), lp[i - 1]);
  for (std::size_t a = 0; a < ops.size(); ++a) {
    for (std::size_t b = a + 1; b < ops.size(); ++b) {
      const bool conjugate = (a / 3 == 0 && b / 3 == 2 && a % 3 == b % 3) || (a / 3 == 1 && b / 3 == 3 && a % 3 == b % 3);
      const std::string id = "[" + ops[a].first + "," + ops[b].first + "]";
      auto r = row(id, commutator(ops[a].second, ops[b].second), conjugate ? scalar(I) : OperatorExpr(),
                   conjugate ? "i" : "0", options);
      r.lhs = id;
      report.relations.push_back(std::move(r));
    }
  }
  for (const auto& sub : {verify_c1_on_velocity(m0, order, options), verify_c1_on_lambda(m0, order, options)}) {
    for (auto r : sub.relations) {
      r.id = sub.suite + ":" + r.id;
      report.relations.push_back(std::move(r));
    }
  }
  return report;
}

std::vector<cplx> taylor_coefficients(const std::function<cplx(cplx)>& f, int order, double radius, int points) {
  std::vector<cplx> a(static_cast<std::size_t>(order + 1), 0.0);
  for (int m = 0; m < points; ++m) {
    const double theta = 2.0 * std::numbers::pi * m / points;
    const cplx z = std::polar(radius, theta);
    const cplx fz = f(z);
    for (int n = 0; n <= order; ++n) a[static_cast<std::size_t>(n)] += fz * std::polar(std::pow(radius, -n), -n * theta);
  }
  for (auto& c : a) c /= static_cast<double>(points);
  return a;
}

namespace {

struct BoostTarget {
  std::string name;
  OperatorExpr Y;
  std::function<cplx(cplx, const SamplePoint&)> closed;
};

std::vector<BoostTarget> boost_targets(BoostKind kind) {
  std::vector<BoostTarget> out;
  switch (kind) {
    case BoostKind::Velocity:
      for (int i : {1, 2}) {
        const std::string v = symbolic::vars::v(i);
        out.push_back({"V" + std::to_string(i), algebra::V(i), [v](cplx s, const SamplePoint& p) {
                         return value(p, v) / (std::cosh(s) * (1.0 - value(p, "v3") * std::tanh(s)));
                       }});
      }
      out.push_back({"V3", algebra::V(3), [](cplx s, const SamplePoint& p) {
                       const double vz = value(p, "v3");
                       return (vz - std::tanh(s)) / (1.0 - vz * std::tanh(s));
                     }});
      break;
    case BoostKind::EnergyMomentum: {
      const ScalarExpr h = generators::momentum_energy(symbolic::param("m0"), {});
      auto energy = [](const SamplePoint& p) {
        double s = value(p, "m0") * value(p, "m0");
        for (int k = 1; k <= 3; ++k) s += value(p, symbolic::vars::p(k)) * value(p, symbolic::vars::p(k));
        return std::sqrt(s);
      };
      out.push_back({"H", OperatorExpr::scalar(h, Representation::Momentum), [energy](cplx s, const SamplePoint& p) {
                       return energy(p) * std::cosh(s) - value(p, "p3") * std::sinh(s);
                     }});
      out.push_back({"P3", algebra::P(3), [energy](cplx s, const SamplePoint& p) {
                       return value(p, "p3") * std::cosh(s) - energy(p) * std::sinh(s);
                     }});
      for (int i : {1, 2}) {
        const std::string name = symbolic::vars::p(i);
        out.push_back({"P" + std::to_string(i), algebra::P(i),
                       [name](cplx, const SamplePoint& p) { return cplx(value(p, name)); }});
      }
      break;
    }
    case BoostKind::Position:
      out.push_back({"X3", algebra::X(3), [](cplx s, const SamplePoint& p) {
                       return value(p, "x3") / (std::cosh(s) * (1.0 - std::tanh(s) * value(p, "v3")));
                     }});
      for (int i : {1, 2}) {
        const std::string x = symbolic::vars::x(i), v = symbolic::vars::v(i);
        out.push_back({"X" + std::to_string(i), algebra::X(i), [x, v](cplx s, const SamplePoint& p) {
                         const cplx b = std::tanh(s);
                         return value(p, x) + b * value(p, "x3") * value(p, v) / (1.0 - b * value(p, "v3"));
                       }});
      }
      break;
  }
  return out;
}

OperatorExpr boost_exponent(BoostKind kind) {
  const ScalarExpr m0 = symbolic::param("m0");
  const auto gen = kind == BoostKind::EnergyMomentum ? generators::build_momentum_generators(m0)
                                                     : generators::build_free_generators(m0);
  return I * gen.K[2];
}

const char* kind_name(BoostKind kind) {
  switch (kind) {
    case BoostKind::Velocity:
      return "boost-velocity";
    case BoostKind::EnergyMomentum:
      return "boost-4vector";
    case BoostKind::Position:
      return "boost-position";
  }
  return "";
}

}  // namespace

VerificationReport verify_boost_closed_forms(BoostKind kind, double s, int order,
                                             const symbolic::ProbeOptions& options) {
  if (std::abs(std::tanh(s)) > 0.9) throw Error("boost check needs |tanh s| <= 0.9");
  VerificationReport report;
  report.suite = kind_name(kind);
  const OperatorExpr x = boost_exponent(kind);
  for (const auto& target : boost_targets(kind)) {
    const auto series = adjoint_series(x, target.Y, order);
    std::vector<ScalarExpr> coeffs;
    bool multiplicative = true;
    for (const auto& t : series.terms) {
      multiplicative = multiplicative && t.is_multiplicative();
      coeffs.push_back(t.scalar_part());
    }
    if (!multiplicative) {
      RelationResult r;
      r.id = target.name;
      r.note = "series term is not multiplicative";
      report.relations.push_back(r);
      continue;
    }
    std::set<std::string> symbols{"m0"};
    for (const auto& c : coeffs) {
      auto f = c.free_symbols();
      symbols.insert(f.begin(), f.end());
    }
    const symbolic::Tape tape(coeffs, std::vector<std::string>(symbols.begin(), symbols.end()));
    symbolic::Tape::Workspace ws;
    std::vector<cplx> out(coeffs.size());
    std::vector<double> per_order(coeffs.size(), 0.0);
    double sum_residual = 0.0;
    symbolic::ProbeReport probed;
    try {
      probed = symbolic::probe(symbols, options, [&](const SamplePoint& pt) {
        tape.evaluate(tape.slot_values(pt), ws, out);
        const auto oracle = taylor_coefficients([&](cplx z) { return target.closed(z, pt); }, order);
        double worst = 0.0;
        std::vector<double> r(out.size());
        cplx partial = 0.0;
        for (std::size_t n = 0; n < out.size(); ++n) {
          r[n] = symbolic::residual(out[n], oracle[n]);
          partial += std::pow(s, static_cast<double>(n)) * out[n];
          if (!(kind == BoostKind::Position && n > 2)) worst = std::max(worst, r[n]);
        }
        for (std::size_t n = 0; n < out.size(); ++n) per_order[n] = std::max(per_order[n], r[n]);
        sum_residual = std::max(sum_residual, symbolic::residual(partial, target.closed(s, pt)));
        return worst;
      });
    } catch (const ProbeExhausted& e) {
      RelationResult r;
      r.id = target.name;
      r.note = e.what();
      report.relations.push_back(r);
      continue;
    }
    for (std::size_t n = 0; n < per_order.size(); ++n) {
      RelationResult r;
      r.id = target.name + "/order" + std::to_string(n);
      r.lhs = coeffs[n].str();
      r.rhs = "Taylor coefficient of the closed form";
      r.max_residual = per_order[n];
      r.trials = probed.trials;
      r.pass = per_order[n] <= options.tol;
      r.informational = kind == BoostKind::Position && n > 2;
      report.relations.push_back(std::move(r));
    }
    RelationResult sum;
    sum.id = target.name + "/sum";
    sum.lhs = "partial sum through order " + std::to_string(order);
    sum.rhs = "closed form at s=" + std::to_string(s);
    sum.max_residual = sum_residual;
    sum.trials = probed.trials;
    sum.pass = true;
    sum.informational = true;
    report.relations.push_back(std::move(sum));
  }
  return report;
}

std::vector<double> boost_velocity_convergence(double s, int order, const symbolic::ProbeOptions& options) {
  const auto target = boost_targets(BoostKind::Velocity).back();
  const auto series = adjoint_series(boost_exponent(BoostKind::Velocity), target.Y, order);
  std::vector<ScalarExpr> coeffs;
  for (const auto& t : series.terms) coeffs.push_back(t.scalar_part());
  const symbolic::Tape tape(coeffs, {"v1", "v2", "v3"});
  symbolic::Tape::Workspace ws;
  std::vector<cplx> out(coeffs.size());
  std::vector<double> err(coeffs.size(), 0.0);
  symbolic::probe({}, options, [&](const SamplePoint& pt) {
    tape.evaluate(tape.slot_values(pt), ws, out);
    const cplx exact = target.closed(s, pt);
    cplx partial = 0.0;
    for (std::size_t n = 0; n < out.size(); ++n) {
      partial += std::pow(s, static_cast<double>(n)) * out[n];
      err[n] = std::max(err[n], std::abs(partial - exact));
    }
    return 0.0;
  });
  return err;
}

}  // namespace relkvn::series
