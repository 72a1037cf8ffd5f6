#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <cstdio>
#include <string>

#include "cubeforms/error.hpp"

namespace cubeforms {

// Exact integer counts can exceed 64 bits (|S|^N for N in the hundreds), so
// all externally visible counts and densities are arbitrary precision.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt pow_big(BigInt base, std::uint64_t exp) {
  BigInt result = 1;
  while (exp != 0) {
    if (exp & 1) result *= base;
    base *= base;
    exp >>= 1;
  }
  return result;
}

inline Rational pow_rational(const Rational& base, std::uint64_t exp) {
  return Rational(pow_big(boost::multiprecision::numerator(base), exp),
                  pow_big(boost::multiprecision::denominator(base), exp));
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

// Canonical "num/den" rendering ("num" alone when the denominator is 1).
inline std::string to_fraction_string(const Rational& q) {
  const BigInt num = boost::multiprecision::numerator(q);
  const BigInt den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline Rational parse_fraction(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigInt(text));
    return Rational(BigInt(text.substr(0, slash)), BigInt(text.substr(slash + 1)));
  } catch (const std::exception&) {
    fail(ErrorKind::InvalidInput, "malformed fraction: " + text);
  }
}

// Shortest decimal that round-trips a double.
inline std::string decimal_string(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  return -floor_div(-a, b);
}

}  // namespace cubeforms
