#include "relkvn/number.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace relkvn::symbolic {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("rational overflow");
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("rational overflow");
  return r;
}

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) {
  if (d == 0) throw std::domain_error("rational with zero denominator");
  if (d < 0) {
    if (n == INT64_MIN || d == INT64_MIN) throw std::overflow_error("rational overflow");
    n = -n;
    d = -d;
  }
  const std::int64_t g = std::gcd(n, d);
  num_ = g == 0 ? 0 : n / g;
  den_ = g == 0 ? 1 : d / g;
}

Rational Rational::operator-() const {
  if (num_ == INT64_MIN) throw std::overflow_error("rational overflow");
  Rational r;
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

Rational operator+(const Rational& a, const Rational& b) {
  if (a.den_ == b.den_) return Rational(checked_add(a.num_, b.num_), a.den_);
  const std::int64_t g = std::gcd(a.den_, b.den_);
  const std::int64_t da = a.den_ / g;
  const std::int64_t db = b.den_ / g;
  return Rational(checked_add(checked_mul(a.num_, db), checked_mul(b.num_, da)), checked_mul(a.den_, db));
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  if (a.num_ == 0 || b.num_ == 0) return Rational(0);
  const std::int64_t g1 = std::gcd(a.num_, b.den_);
  const std::int64_t g2 = std::gcd(b.num_, a.den_);
  return Rational(checked_mul(a.num_ / g1, b.num_ / g2), checked_mul(a.den_ / g2, b.den_ / g1));
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw std::domain_error("rational division by zero");
  return a * Rational(b.den_, b.num_);
}

bool operator<(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::optional<Rational> rational_from_decimal(const std::string& text) {
  std::size_t pos = 0;
  std::int64_t mantissa = 0;
  std::int64_t scale = 0;
  bool any_digit = false;
  bool after_point = false;
  try {
    for (; pos < text.size(); ++pos) {
      const char c = text[pos];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        any_digit = true;
        mantissa = checked_add(checked_mul(mantissa, 10), c - '0');
        if (after_point) ++scale;
      } else if (c == '.' && !after_point) {
        after_point = true;
      } else {
        break;
      }
    }
    if (!any_digit) return std::nullopt;
    std::int64_t exponent = 0;
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
      ++pos;
      bool neg = false;
      if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) neg = text[pos++] == '-';
      if (pos >= text.size()) return std::nullopt;
      for (; pos < text.size(); ++pos) {
        if (!std::isdigit(static_cast<unsigned char>(text[pos]))) return std::nullopt;
        exponent = exponent * 10 + (text[pos] - '0');
        if (exponent > 30) return std::nullopt;
      }
      if (neg) exponent = -exponent;
    }
    if (pos != text.size()) return std::nullopt;
    const std::int64_t net = exponent - scale;
    std::int64_t p10 = 1;
    for (std::int64_t k = 0; k < (net < 0 ? -net : net); ++k) p10 = checked_mul(p10, 10);
    return net >= 0 ? Rational(checked_mul(mantissa, p10)) : Rational(mantissa, p10);
  } catch (const std::overflow_error&) {
    return std::nullopt;
  }
}

Number::Number(Rational re, Rational im)
    : exact_(true), re_(re), im_(im), value_(re.to_double(), im.to_double()) {}

Number Number::inexact(std::complex<double> value) {
  Number n;
  n.exact_ = false;
  n.re_ = Rational(0);
  n.im_ = Rational(0);
  n.value_ = value;
  return n;
}

Number Number::from_double(double value) {
  // Integers and dyadic fractions with small denominators stay exact.
  if (std::isfinite(value)) {
    for (std::int64_t den = 1; den <= (1 << 20); den *= 2) {
      const double scaled = value * static_cast<double>(den);
      if (std::abs(scaled) < 9.0e15 && scaled == std::floor(scaled)) {
        return Number(Rational(static_cast<std::int64_t>(scaled), den));
      }
    }
  }
  return inexact({value, 0.0});
}

bool Number::is_zero() const noexcept {
  return exact_ ? (re_.is_zero() && im_.is_zero()) : (value_ == std::complex<double>(0.0, 0.0));
}

bool Number::is_one() const noexcept {
  return exact_ ? (re_.is_one() && im_.is_zero()) : (value_ == std::complex<double>(1.0, 0.0));
}

bool Number::is_real() const noexcept { return exact_ ? im_.is_zero() : value_.imag() == 0.0; }

Number Number::operator-() const {
  if (exact_) {
    try {
      return Number(-re_, -im_);
    } catch (const std::overflow_error&) {
    }
  }
  return inexact(-value_);
}

Number Number::conj() const {
  if (exact_) {
    try {
      return Number(re_, -im_);
    } catch (const std::overflow_error&) {
    }
  }
  return inexact(std::conj(value_));
}

Number operator+(const Number& a, const Number& b) {
  if (a.exact_ && b.exact_) {
    try {
      return Number(a.re_ + b.re_, a.im_ + b.im_);
    } catch (const std::overflow_error&) {
    }
  }
  return Number::inexact(a.value_ + b.value_);
}

Number operator-(const Number& a, const Number& b) { return a + (-b); }

Number operator*(const Number& a, const Number& b) {
  if (a.exact_ && b.exact_) {
    try {
      return Number(a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_);
    } catch (const std::overflow_error&) {
    }
  }
  return Number::inexact(a.value_ * b.value_);
}

Number operator/(const Number& a, const Number& b) {
  if (b.is_zero()) throw std::domain_error("division by zero constant");
  if (a.exact_ && b.exact_) {
    try {
      const Rational d = b.re_ * b.re_ + b.im_ * b.im_;
      const Number conj_b = b.conj();
      const Number num = a * conj_b;
      if (num.exact_) return Number(num.re_ / d, num.im_ / d);
    } catch (const std::overflow_error&) {
    }
  }
  return Number::inexact(a.value_ / b.value_);
}

Number Number::pow(std::int64_t n) const {
  if (n < 0) return Number(1) / pow(-n);
  Number result(1);
  Number base = *this;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

bool operator==(const Number& a, const Number& b) noexcept {
  if (a.exact_ != b.exact_) return false;
  if (a.exact_) return a.re_ == b.re_ && a.im_ == b.im_;
  return a.value_ == b.value_;
}

std::size_t Number::hash() const noexcept {
  std::size_t h = exact_ ? 0x51u : 0x7fu;
  if (exact_) {
    h = mix(h, static_cast<std::size_t>(re_.num()));
    h = mix(h, static_cast<std::size_t>(re_.den()));
    h = mix(h, static_cast<std::size_t>(im_.num()));
    h = mix(h, static_cast<std::size_t>(im_.den()));
  } else {
    h = mix(h, std::bit_cast<std::uint64_t>(value_.real()));
    h = mix(h, std::bit_cast<std::uint64_t>(value_.imag()));
  }
  return h;
}

std::string Number::str() const {
  std::ostringstream os;
  if (!exact_) {
    os.precision(17);
    if (value_.imag() == 0.0) {
      os << value_.real();
    } else {
      os << "(" << value_.real() << (value_.imag() < 0 ? "-" : "+") << std::abs(value_.imag()) << "*i)";
    }
    return os.str();
  }
  if (im_.is_zero()) return re_.str();
  const auto imag_part = [&] {
    if (im_.is_one()) return std::string("i");
    if (im_ == Rational(-1)) return std::string("-i");
    return im_.str() + "*i";
  };
  if (re_.is_zero()) return imag_part();
  os << "(" << re_.str() << (im_ < Rational(0) ? "" : "+") << imag_part() << ")";
  return os.str();
}

}  // namespace relkvn::symbolic
