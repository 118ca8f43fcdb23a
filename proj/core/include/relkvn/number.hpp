#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>

namespace relkvn::symbolic {

/// Exact rational with 64-bit components. Arithmetic throws std::overflow_error
/// when a result does not fit; callers that can degrade to floating point catch it.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t n, std::int64_t d);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }

  bool is_zero() const noexcept { return num_ == 0; }
  bool is_one() const noexcept { return num_ == 1 && den_ == 1; }
  bool is_integer() const noexcept { return den_ == 1; }
  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  Rational operator-() const;
  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  friend bool operator==(const Rational& a, const Rational& b) noexcept {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator<(const Rational& a, const Rational& b);

  std::string str() const;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Parses a decimal literal ("12", "0.25", "1e-3") into an exact rational.
std::optional<Rational> rational_from_decimal(const std::string& text);

/// Complex constant: exact Gaussian rational when possible, double otherwise.
class Number {
 public:
  Number() : Number(Rational(0)) {}
  Number(Rational re, Rational im = Rational(0));  // NOLINT(google-explicit-constructor)
  Number(std::int64_t n) : Number(Rational(n)) {}  // NOLINT(google-explicit-constructor)
  static Number inexact(std::complex<double> value);
  static Number from_double(double value);
  static Number imaginary_unit() { return Number(Rational(0), Rational(1)); }

  bool exact() const noexcept { return exact_; }
  const Rational& re() const noexcept { return re_; }
  const Rational& im() const noexcept { return im_; }
  std::complex<double> value() const noexcept { return value_; }

  bool is_zero() const noexcept;
  bool is_one() const noexcept;
  bool is_real() const noexcept;

  Number operator-() const;
  Number conj() const;
  friend Number operator+(const Number& a, const Number& b);
  friend Number operator-(const Number& a, const Number& b);
  friend Number operator*(const Number& a, const Number& b);
  friend Number operator/(const Number& a, const Number& b);
  /// Integer power; exact when the base is exact and nothing overflows.
  Number pow(std::int64_t n) const;

  friend bool operator==(const Number& a, const Number& b) noexcept;
  std::size_t hash() const noexcept;
  std::string str() const;

 private:
  bool exact_ = true;
  Rational re_;
  Rational im_;
  std::complex<double> value_;
};

}  // namespace relkvn::symbolic
