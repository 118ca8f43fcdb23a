#pragma once

#include <stdexcept>
#include <string>

namespace relkvn {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// A symbol referenced by an expression has no value at the evaluation point.
class UnassignedVariable : public Error {
 public:
  explicit UnassignedVariable(const std::string& name)
      : Error("unassigned symbol '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Division by zero, even root of a negative real, or a non-finite result.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Numeric probing could not find a well-defined sample point.
class ProbeExhausted : public Error {
 public:
  using Error::Error;
};

class OrderCapExceeded : public Error {
 public:
  OrderCapExceeded(int order, int cap)
      : Error("derivation order " + std::to_string(order) + " exceeds cap " + std::to_string(cap)),
        order_(order),
        cap_(cap) {}
  int order() const noexcept { return order_; }
  int cap() const noexcept { return cap_; }

 private:
  int order_;
  int cap_;
};

class RepresentationMismatch : public Error {
 public:
  using Error::Error;
};

class SpeedLimitBreached : public Error {
 public:
  using Error::Error;
};

class NonFiniteState : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class UnknownIdentity : public Error {
 public:
  using Error::Error;
};

}  // namespace relkvn
