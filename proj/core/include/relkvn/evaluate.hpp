#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relkvn/scalar_expr.hpp"

namespace relkvn::symbolic {

/// Assignment of real values to symbols.
class SamplePoint {
 public:
  SamplePoint() = default;
  SamplePoint(std::initializer_list<std::pair<const std::string, double>> init) : values_(init) {}

  SamplePoint& set(const std::string& name, double value) {
    values_[name] = value;
    return *this;
  }
  std::optional<double> get(const std::string& name) const;
  const std::map<std::string, double>& values() const noexcept { return values_; }
  std::string str() const;

 private:
  std::map<std::string, double> values_;
};

/// Flattened evaluation program for one or more expressions sharing a slot layout.
///
/// Slots are the symbols in the order given at construction. A Tape is immutable;
/// scratch registers live in a Workspace so one tape may be shared across threads.
class Tape {
 public:
  struct Workspace {
    std::vector<std::complex<double>> registers;
    std::vector<double> path_slots;
  };

  /// Slots default to the sorted union of free symbols of `roots`.
  explicit Tape(const std::vector<ScalarExpr>& roots, std::vector<std::string> slots = {});
  ~Tape();
  Tape(Tape&&) noexcept;
  Tape& operator=(Tape&&) noexcept;

  const std::vector<std::string>& slots() const noexcept { return slots_; }
  std::size_t outputs() const noexcept { return outputs_.size(); }
  std::size_t size() const noexcept;

  /// Evaluates all roots. Throws DomainError on division by zero, an even root
  /// of a negative real, or a non-finite result.
  void evaluate(std::span<const double> slot_values, Workspace& ws, std::span<std::complex<double>> out) const;
  std::complex<double> evaluate_one(std::span<const double> slot_values, Workspace& ws, std::size_t index = 0) const;

  /// Maps a SamplePoint onto the slot layout; throws UnassignedVariable.
  std::vector<double> slot_values(const SamplePoint& point) const;

  struct Program;

 private:
  std::vector<std::string> slots_;
  std::vector<std::uint32_t> outputs_;
  std::unique_ptr<Program> program_;
};

/// Evaluates an expression at a point. Throws UnassignedVariable or DomainError.
std::complex<double> eval(const ScalarExpr& e, const SamplePoint& point);

/// Complex power with the branch rules used everywhere in the library:
/// integer exponents by repeated multiplication, real roots of negative reals
/// for odd denominators, DomainError for even roots of negative reals.
std::complex<double> rational_power(std::complex<double> base, const Rational& exponent);

}  // namespace relkvn::symbolic
