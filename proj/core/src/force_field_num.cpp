#include <cmath>

#include "relkvn/error.hpp"
#include "relkvn/evaluate.hpp"
#include "relkvn/phase_flow.hpp"

namespace relkvn::flow {

namespace {

using symbolic::ScalarExpr;

Vec3d cross(const Vec3d& a, const Vec3d& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Real-valued components over (x1, x2, x3, t); constant ones skip the tape.
class CompiledComponents {
 public:
  explicit CompiledComponents(const std::vector<ScalarExpr>& exprs) : values_(exprs.size(), 0.0) {
    std::vector<ScalarExpr> live;
    for (std::size_t k = 0; k < exprs.size(); ++k) {
      if (exprs[k].is_constant()) {
        values_[k] = exprs[k].constant_value().value().real();
      } else {
        index_.push_back(k);
        live.push_back(exprs[k]);
      }
    }
    if (live.empty()) return;
    try {
      tape_ = std::make_shared<symbolic::Tape>(
          live, std::vector<std::string>{symbolic::vars::x(1), symbolic::vars::x(2), symbolic::vars::x(3),
                                         symbolic::vars::t});
    } catch (const UnassignedVariable& e) {
      throw ConfigError("field depends on unbound symbol '" + e.name() + "'");
    }
  }

  bool constant() const noexcept { return !tape_; }

  void eval(const Vec3d& r, double t, double* out) const {
    for (std::size_t k = 0; k < values_.size(); ++k) out[k] = values_[k];
    if (!tape_) return;
    thread_local symbolic::Tape::Workspace ws;
    thread_local std::vector<std::complex<double>> res;
    res.resize(index_.size());
    const double slots[4] = {r[0], r[1], r[2], t};
    tape_->evaluate(slots, ws, res);
    for (std::size_t k = 0; k < index_.size(); ++k) out[index_[k]] = res[k].real();
  }

 private:
  std::vector<double> values_;
  std::vector<std::size_t> index_;
  std::shared_ptr<symbolic::Tape> tape_;
};

}  // namespace

ForceFieldNum::ForceFieldNum() = default;

ForceFieldNum ForceFieldNum::uniform(const Vec3d& E, const Vec3d& B) {
  ForceFieldNum f;
  f.E0_ = E;
  f.B0_ = B;
  f.potentials_ = [E, B](const Vec3d& r, double) {
    Potentials pot;
    pot.phi = -(E[0] * r[0] + E[1] * r[1] + E[2] * r[2]);
    const Vec3d half_a = cross(B, r);
    for (int j = 0; j < 3; ++j) {
      pot.grad_phi[j] = -E[j];
      pot.A[j] = 0.5 * half_a[j];
    }
    // A_j = ½ ε_jkl B_k r_l
    for (int i = 0; i < 3; ++i) {
      Vec3d ei{};
      ei[i] = 1.0;
      const Vec3d col = cross(B, ei);
      for (int j = 0; j < 3; ++j) pot.dA[i][j] = 0.5 * col[j];
    }
    return pot;
  };
  if (B == Vec3d{}) {
    f.derivatives0_ = f.potentials_({}, 0.0);
    f.derivatives0_.phi = 0.0;
  } else {
    f.constant_derivatives_ = false;
    f.derivatives_ = f.potentials_;
  }
  return f;
}

ForceFieldNum ForceFieldNum::from_functions(FieldFunction fields, PotentialFunction potentials) {
  if (!fields) throw ConfigError("field function is empty");
  ForceFieldNum f;
  f.uniform_ = false;
  f.fields_ = std::move(fields);
  f.potentials_ = std::move(potentials);
  f.constant_derivatives_ = false;
  f.derivatives_ = f.potentials_;
  return f;
}

ForceFieldNum ForceFieldNum::compile(const generators::ForceField& field, const std::map<std::string, double>& params) {
  std::map<std::string, ScalarExpr> bind;
  for (const auto& [name, value] : params) bind.emplace(name, ScalarExpr(symbolic::Number::from_double(value)));
  const ScalarExpr phi = symbolic::substitute(field.phi, bind);
  std::array<ScalarExpr, 3> A;
  for (int j = 0; j < 3; ++j) A[j] = symbolic::substitute(field.A[j], bind);

  const std::string xs[3] = {symbolic::vars::x(1), symbolic::vars::x(2), symbolic::vars::x(3)};
  std::vector<ScalarExpr> eb(6);
  for (int j = 0; j < 3; ++j) eb[j] = -symbolic::diff(phi, xs[j]) - symbolic::diff(A[j], symbolic::vars::t);
  eb[3] = symbolic::diff(A[2], xs[1]) - symbolic::diff(A[1], xs[2]);
  eb[4] = symbolic::diff(A[0], xs[2]) - symbolic::diff(A[2], xs[0]);
  eb[5] = symbolic::diff(A[1], xs[0]) - symbolic::diff(A[0], xs[1]);

  // grad phi, A, dA (row-major)
  std::vector<ScalarExpr> pot;
  for (int j = 0; j < 3; ++j) pot.push_back(symbolic::diff(phi, xs[j]));
  for (int j = 0; j < 3; ++j) pot.push_back(A[j]);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) pot.push_back(symbolic::diff(A[j], xs[i]));

  auto fields = std::make_shared<CompiledComponents>(eb);
  auto derivs = std::make_shared<CompiledComponents>(pot);
  auto potential = std::make_shared<CompiledComponents>(std::vector<ScalarExpr>{phi});

  ForceFieldNum f;
  if (fields->constant()) {
    double v[6];
    fields->eval({}, 0.0, v);
    f.E0_ = {v[0], v[1], v[2]};
    f.B0_ = {v[3], v[4], v[5]};
  } else {
    f.uniform_ = false;
    f.fields_ = [fields](const Vec3d& r, double t, Vec3d& E, Vec3d& B) {
      double v[6];
      fields->eval(r, t, v);
      E = {v[0], v[1], v[2]};
      B = {v[3], v[4], v[5]};
    };
  }
  f.derivatives_ = [derivs](const Vec3d& r, double t) {
    double v[15];
    derivs->eval(r, t, v);
    Potentials out;
    for (int j = 0; j < 3; ++j) {
      out.grad_phi[j] = v[j];
      out.A[j] = v[3 + j];
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out.dA[i][j] = v[6 + 3 * i + j];
    return out;
  };
  f.potentials_ = [derivs = f.derivatives_, potential](const Vec3d& r, double t) {
    Potentials out = derivs(r, t);
    potential->eval(r, t, &out.phi);
    return out;
  };
  f.constant_derivatives_ = derivs->constant();
  if (f.constant_derivatives_) f.derivatives0_ = f.derivatives_({}, 0.0);
  return f;
}

void ForceFieldNum::fields(const Vec3d& r, double t, Vec3d& E, Vec3d& B) const {
  if (uniform_) {
    E = E0_;
    B = B0_;
    return;
  }
  fields_(r, t, E, B);
}

Vec3d ForceFieldNum::force(const Vec3d& r, const Vec3d& w, double t) const {
  Vec3d E, B;
  fields(r, t, E, B);
  const Vec3d wb = cross(w, B);
  return {E[0] + wb[0], E[1] + wb[1], E[2] + wb[2]};
}

ForceFieldNum::Potentials ForceFieldNum::potentials(const Vec3d& r, double t) const {
  if (!potentials_) throw ConfigError("field has no potentials; momentum representation needs φ and A");
  return potentials_(r, t);
}

ForceFieldNum::Potentials ForceFieldNum::potential_derivatives(const Vec3d& r, double t) const {
  if (constant_derivatives_) return derivatives0_;
  if (!derivatives_) throw ConfigError("field has no potentials; momentum representation needs φ and A");
  return derivatives_(r, t);
}

}  // namespace relkvn::flow
