#pragma once

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mmflow {

using Rational = mpq_class;

/// Parses an exact rational from "3", "-2", "0.125", "1/3" or "2.5e-3".
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
  s = s.substr(start);
  if (s.empty()) throw std::invalid_argument("empty number");

  if (s.find('/') != std::string::npos) {
    Rational q;
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("malformed rational '" + s + "'");
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
  }

  std::string mantissa = s;
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string::npos) {
    mantissa = s.substr(0, e);
    try {
      std::size_t used = 0;
      exponent = std::stol(s.substr(e + 1), &used);
      if (used != s.size() - e - 1) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed exponent in '" + s + "'");
    }
  }
  bool negative = false;
  if (!mantissa.empty() && (mantissa[0] == '-' || mantissa[0] == '+')) {
    negative = mantissa[0] == '-';
    mantissa.erase(0, 1);
  }
  std::string digits;
  long fraction_digits = 0;
  bool seen_point = false;
  for (char c : mantissa) {
    if (c == '.') {
      if (seen_point) throw std::invalid_argument("malformed decimal '" + s + "'");
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      digits.push_back(c);
      if (seen_point) ++fraction_digits;
    } else {
      throw std::invalid_argument("malformed decimal '" + s + "'");
    }
  }
  if (digits.empty()) throw std::invalid_argument("malformed decimal '" + s + "'");

  mpz_class numerator(digits, 10);
  long scale = exponent - fraction_digits;
  mpz_class power;
  mpz_ui_pow_ui(power.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(scale)));
  Rational q = scale >= 0 ? Rational(numerator * power) : Rational(numerator, power);
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline double to_double(const Rational& q) { return q.get_d(); }

/// Exact conversion; every finite double is a dyadic rational.
inline Rational to_rational(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite value has no rational form");
  return Rational(x);
}

/// Formats with 12 significant digits.
inline std::string format_double(double x) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.12g", x);
  return buffer;
}

/// Arithmetic policy for the two supported scalar types. `double` runs with
/// tolerances; `Rational` is exact and every tolerance is zero.
template <typename Scalar>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static double tolerance() { return 1e-9; }
  static double from_rational(const Rational& q) { return q.get_d(); }
  static Rational to_rational(double x) { return mmflow::to_rational(x); }
  static double to_double(double x) { return x; }
};

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static Rational tolerance() { return Rational(0); }
  static Rational from_rational(const Rational& q) { return q; }
  static Rational to_rational(const Rational& q) { return q; }
  static double to_double(const Rational& q) { return q.get_d(); }
};

}  // namespace mmflow
