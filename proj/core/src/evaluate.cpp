#include "relkvn/evaluate.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "relkvn/error.hpp"

namespace relkvn::symbolic {

std::optional<double> SamplePoint::get(const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string SamplePoint::str() const {
  std::ostringstream os;
  os.precision(6);
  bool first = true;
  for (const auto& [k, v] : values_) {
    os << (first ? "" : ", ") << k << "=" << v;
    first = false;
  }
  return os.str();
}

std::complex<double> rational_power(std::complex<double> base, const Rational& exponent) {
  if (exponent.is_integer()) {
    std::int64_t n = exponent.num();
    if (base == std::complex<double>(0.0, 0.0)) {
      if (n < 0) throw DomainError("division by zero");
      return n == 0 ? 1.0 : 0.0;
    }
    const bool invert = n < 0;
    if (invert) n = -n;
    std::complex<double> result(1.0, 0.0);
    std::complex<double> b = base;
    while (n > 0) {
      if (n & 1) result *= b;
      n >>= 1;
      if (n > 0) b *= b;
    }
    return invert ? 1.0 / result : result;
  }
  const double e = exponent.to_double();
  if (base.imag() == 0.0) {
    const double b = base.real();
    if (b == 0.0) {
      if (e < 0.0) throw DomainError("division by zero");
      return 0.0;
    }
    if (b < 0.0) {
      if (exponent.den() % 2 == 0) throw DomainError("even root of a negative real");
      const double mag = std::pow(-b, e);
      return (exponent.num() % 2 == 0) ? mag : -mag;
    }
    return std::pow(b, e);
  }
  return std::pow(base, e);
}

namespace {

enum class OpKind : std::uint8_t { Const, Slot, Sum, Product, LineIntegral };

struct Instr {
  OpKind kind;
  std::complex<double> c;
  std::uint32_t begin = 0;
  std::uint32_t end = 0;
};

}  // namespace

struct Tape::Program {
  struct Integral {
    std::unique_ptr<Tape> gradients;
    std::vector<std::uint32_t> path_slots;
    std::vector<double> reference;
  };

  std::vector<Instr> code;
  std::vector<std::uint32_t> operand;
  std::vector<std::complex<double>> weight;
  std::vector<Rational> exponent;
  std::vector<Integral> integrals;
};

namespace {

class Compiler {
 public:
  Compiler(Tape::Program& prog, const std::vector<std::string>& slots) : prog_(prog) {
    for (std::uint32_t k = 0; k < slots.size(); ++k) slot_index_[slots[k]] = k;
    slots_ = &slots;
  }

  std::uint32_t emit(const ScalarExpr& e) {
    auto it = reg_.find(e.id());
    if (it != reg_.end()) return it->second;
    const Node& n = e.node();
    Instr ins{};
    switch (n.kind) {
      case NodeKind::Constant:
        ins.kind = OpKind::Const;
        ins.c = n.value.value();
        break;
      case NodeKind::Symbol: {
        auto s = slot_index_.find(n.name);
        if (s == slot_index_.end()) throw UnassignedVariable(n.name);
        ins.kind = OpKind::Slot;
        ins.begin = s->second;
        break;
      }
      case NodeKind::Sum: {
        std::vector<std::uint32_t> ops;
        for (const auto& t : n.terms) ops.push_back(emit(t.expr));
        ins.kind = OpKind::Sum;
        ins.c = n.value.value();
        ins.begin = static_cast<std::uint32_t>(prog_.operand.size());
        for (std::size_t k = 0; k < ops.size(); ++k) {
          prog_.operand.push_back(ops[k]);
          prog_.weight.push_back(n.terms[k].coeff.value());
          prog_.exponent.push_back(Rational(1));
        }
        ins.end = static_cast<std::uint32_t>(prog_.operand.size());
        break;
      }
      case NodeKind::Product: {
        std::vector<std::uint32_t> ops;
        for (const auto& f : n.factors) ops.push_back(emit(f.base));
        ins.kind = OpKind::Product;
        ins.c = n.value.value();
        ins.begin = static_cast<std::uint32_t>(prog_.operand.size());
        for (std::size_t k = 0; k < ops.size(); ++k) {
          prog_.operand.push_back(ops[k]);
          prog_.weight.push_back(1.0);
          prog_.exponent.push_back(n.factors[k].exponent);
        }
        ins.end = static_cast<std::uint32_t>(prog_.operand.size());
        break;
      }
      case NodeKind::LineIntegral: {
        Tape::Program::Integral integral;
        std::vector<ScalarExpr> grads;
        for (const auto& c : n.path) {
          auto s = slot_index_.find(c.symbol);
          if (s == slot_index_.end()) throw UnassignedVariable(c.symbol);
          integral.path_slots.push_back(s->second);
          integral.reference.push_back(c.reference);
          grads.push_back(c.gradient);
        }
        integral.gradients = std::make_unique<Tape>(grads, *slots_);
        ins.kind = OpKind::LineIntegral;
        ins.begin = static_cast<std::uint32_t>(prog_.integrals.size());
        prog_.integrals.push_back(std::move(integral));
        break;
      }
    }
    const auto idx = static_cast<std::uint32_t>(prog_.code.size());
    prog_.code.push_back(ins);
    reg_.emplace(e.id(), idx);
    keep_.push_back(e);
    return idx;
  }

 private:
  Tape::Program& prog_;
  const std::vector<std::string>* slots_ = nullptr;
  std::unordered_map<std::string, std::uint32_t> slot_index_;
  std::unordered_map<const Node*, std::uint32_t> reg_;
  std::vector<ScalarExpr> keep_;
};

std::complex<double> integrate_path(const Tape::Program::Integral& in, std::span<const double> slots) {
  std::vector<double> delta(in.path_slots.size());
  for (std::size_t k = 0; k < delta.size(); ++k) delta[k] = slots[in.path_slots[k]] - in.reference[k];
  std::vector<double> local(slots.begin(), slots.end());
  Tape::Workspace ws;
  std::vector<std::complex<double>> g(in.path_slots.size());
  auto integrand = [&](double tau) -> std::complex<double> {
    for (std::size_t k = 0; k < delta.size(); ++k) local[in.path_slots[k]] = in.reference[k] + tau * delta[k];
    in.gradients->evaluate(local, ws, g);
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < delta.size(); ++k) acc += g[k] * delta[k];
    return acc;
  };
  using boost::math::quadrature::gauss_kronrod;
  const double re = gauss_kronrod<double, 31>::integrate([&](double tau) { return integrand(tau).real(); }, 0.0,
                                                         1.0, 20, 1e-14);
  const double im = gauss_kronrod<double, 31>::integrate([&](double tau) { return integrand(tau).imag(); }, 0.0,
                                                         1.0, 20, 1e-14);
  return {re, im};
}

}  // namespace

Tape::Tape(const std::vector<ScalarExpr>& roots, std::vector<std::string> slots)
    : slots_(std::move(slots)), program_(std::make_unique<Program>()) {
  if (slots_.empty()) {
    std::set<std::string> all;
    for (const auto& r : roots) {
      auto s = r.free_symbols();
      all.insert(s.begin(), s.end());
    }
    slots_.assign(all.begin(), all.end());
  }
  Compiler c(*program_, slots_);
  for (const auto& r : roots) outputs_.push_back(c.emit(r));
}

Tape::~Tape() = default;
Tape::Tape(Tape&&) noexcept = default;
Tape& Tape::operator=(Tape&&) noexcept = default;

std::size_t Tape::size() const noexcept { return program_->code.size(); }

void Tape::evaluate(std::span<const double> slot_values, Workspace& ws, std::span<std::complex<double>> out) const {
  const Program& p = *program_;
  ws.registers.resize(p.code.size());
  auto& r = ws.registers;
  for (std::size_t k = 0; k < p.code.size(); ++k) {
    const Instr& ins = p.code[k];
    switch (ins.kind) {
      case OpKind::Const:
        r[k] = ins.c;
        break;
      case OpKind::Slot:
        r[k] = slot_values[ins.begin];
        break;
      case OpKind::Sum: {
        std::complex<double> acc = ins.c;
        for (std::uint32_t j = ins.begin; j < ins.end; ++j) acc += p.weight[j] * r[p.operand[j]];
        r[k] = acc;
        break;
      }
      case OpKind::Product: {
        std::complex<double> acc = ins.c;
        for (std::uint32_t j = ins.begin; j < ins.end; ++j) {
          const Rational& e = p.exponent[j];
          acc *= e.is_one() ? r[p.operand[j]] : rational_power(r[p.operand[j]], e);
        }
        r[k] = acc;
        break;
      }
      case OpKind::LineIntegral:
        r[k] = integrate_path(p.integrals[ins.begin], slot_values);
        break;
    }
    if (!std::isfinite(r[k].real()) || !std::isfinite(r[k].imag())) throw DomainError("non-finite value");
  }
  for (std::size_t k = 0; k < outputs_.size(); ++k) out[k] = r[outputs_[k]];
}

std::complex<double> Tape::evaluate_one(std::span<const double> slot_values, Workspace& ws, std::size_t index) const {
  std::vector<std::complex<double>> out(outputs_.size());
  evaluate(slot_values, ws, out);
  return out.at(index);
}

std::vector<double> Tape::slot_values(const SamplePoint& point) const {
  std::vector<double> vals(slots_.size());
  for (std::size_t k = 0; k < slots_.size(); ++k) {
    auto v = point.get(slots_[k]);
    if (!v) throw UnassignedVariable(slots_[k]);
    vals[k] = *v;
  }
  return vals;
}

std::complex<double> eval(const ScalarExpr& e, const SamplePoint& point) {
  Tape tape({e});
  Tape::Workspace ws;
  return tape.evaluate_one(tape.slot_values(point), ws);
}

}  // namespace relkvn::symbolic
