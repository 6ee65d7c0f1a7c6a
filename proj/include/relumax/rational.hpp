#pragma once

#include <gmpxx.h>

#include <cctype>
#include <compare>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

#include "relumax/errors.hpp"

namespace relumax {

/// Exact rational scalar. Always canonical: gcd(|num|, den) = 1, den >= 1.
class Rational {
 public:
  Rational() = default;
  Rational(long v) : q_(v) {}  // NOLINT(google-explicit-constructor)
  Rational(int v) : q_(static_cast<long>(v)) {}  // NOLINT
  Rational(const mpz_class& v) : q_(v) {}  // NOLINT
  explicit Rational(const mpq_class& v) : q_(v) { q_.canonicalize(); }

  Rational(const mpz_class& num, const mpz_class& den) {
    if (den == 0) throw InvalidInput("rational with zero denominator");
    q_ = mpq_class(num, den);
    q_.canonicalize();
  }
  Rational(long num, long den) : Rational(mpz_class(num), mpz_class(den)) {}

  /// Parses "p/q", an integer, or a finite decimal ("-1.25", "3e-2").
  static Rational parse(std::string_view text);

  mpz_class numerator() const { return q_.get_num(); }
  mpz_class denominator() const { return q_.get_den(); }
  const mpq_class& raw() const { return q_; }

  int sign() const { return sgn(q_); }
  bool is_zero() const { return sgn(q_) == 0; }
  bool is_integer() const { return q_.get_den() == 1; }

  Rational abs() const { return Rational(mpq_class(::abs(q_))); }

  /// "p/q", or "p" when the value is an integer.
  std::string str() const {
    if (is_integer()) return q_.get_num().get_str();
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
  }

  /// Decimal truncated toward zero to `digits` fractional digits.
  /// For display only.
  std::string decimal(int digits = 6) const;

  double to_double() const { return q_.get_d(); }

  Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
  Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
  Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw InvalidInput("division by zero");
    q_ /= o.q_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.q_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) == 0; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const int c = cmp(a.q_, b.q_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  mpq_class q_;
};

inline Rational relu(const Rational& x) { return x.sign() > 0 ? x : Rational(); }

inline Rational pow(const Rational& base, unsigned long exponent) {
  mpz_class n, d;
  mpz_pow_ui(n.get_mpz_t(), base.numerator().get_mpz_t(), exponent);
  mpz_pow_ui(d.get_mpz_t(), base.denominator().get_mpz_t(), exponent);
  return Rational(n, d);
}

/// Largest integer <= x.
inline mpz_class floor(const Rational& x) {
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), x.numerator().get_mpz_t(), x.denominator().get_mpz_t());
  return out;
}

inline Rational Rational::parse(std::string_view text) {
  auto fail = [&]() -> InvalidInput {
    return InvalidInput("not a rational literal: \"" + std::string(text) + "\"");
  };
  auto all_digits = [](std::string_view s) {
    if (s.empty()) return false;
    for (char ch : s)
      if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
    return true;
  };

  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) throw fail();

  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }

  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    const auto num = s.substr(0, slash);
    const auto den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) throw fail();
    mpz_class d(std::string(den), 10);
    if (d == 0) throw fail();
    mpz_class n(std::string(num), 10);
    return Rational(negative ? mpz_class(-n) : n, d);
  }

  long exponent = 0;
  if (const auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp = s.substr(e + 1);
    bool exp_negative = false;
    if (!exp.empty() && (exp.front() == '+' || exp.front() == '-')) {
      exp_negative = exp.front() == '-';
      exp.remove_prefix(1);
    }
    if (!all_digits(exp) || exp.size() > 6) throw fail();
    exponent = std::stol(std::string(exp));
    if (exp_negative) exponent = -exponent;
    s = s.substr(0, e);
  }

  std::string digits;
  if (const auto dot = s.find('.'); dot != std::string_view::npos) {
    const auto whole = s.substr(0, dot);
    const auto frac = s.substr(dot + 1);
    if (whole.empty() && frac.empty()) throw fail();
    if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)))
      throw fail();
    digits = std::string(whole) + std::string(frac);
    exponent -= static_cast<long>(frac.size());
  } else {
    if (!all_digits(s)) throw fail();
    digits = std::string(s);
  }

  mpz_class n(digits, 10);
  if (negative) n = -n;
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  return exponent >= 0 ? Rational(mpz_class(n * scale)) : Rational(n, scale);
}

inline std::string Rational::decimal(int digits) const {
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  mpz_class scaled;
  const mpz_class num = ::abs(q_.get_num()) * scale;
  mpz_tdiv_q(scaled.get_mpz_t(), num.get_mpz_t(), q_.get_den().get_mpz_t());
  std::string s = scaled.get_str();
  if (digits > 0) {
    if (s.size() <= static_cast<std::size_t>(digits))
      s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
    s.insert(s.size() - static_cast<std::size_t>(digits), ".");
  }
  return (sign() < 0 ? "-" : "") + s;
}

}  // namespace relumax
