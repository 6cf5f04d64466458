#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "reebidx/errors.hpp"

namespace reebidx {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Integer rat_num(const Rational& x) { return numerator(x); }
inline Integer rat_den(const Rational& x) { return denominator(x); }

inline bool is_integer(const Rational& x) { return denominator(x) == 1; }

/// Largest integer not exceeding x.
inline Integer rat_floor(const Rational& x) {
  Integer q = numerator(x) / denominator(x);
  if (numerator(x) < 0 && q * denominator(x) != numerator(x)) --q;
  return q;
}

inline Integer rat_ceil(const Rational& x) { return -rat_floor(-x); }

/// Fractional part in [0, 1).
inline Rational rat_frac(const Rational& x) { return x - Rational(rat_floor(x)); }

inline Integer int_gcd(Integer a, Integer b) { return boost::multiprecision::gcd(a, b); }

inline Integer int_lcm(Integer a, Integer b) {
  if (a == 0 || b == 0) return 0;
  return boost::multiprecision::lcm(a, b);
}

inline Rational rat_abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }

inline Rational rat_pow(const Rational& base, unsigned k) {
  Rational out = 1;
  Rational b = base;
  for (unsigned e = k; e > 0; e >>= 1) {
    if (e & 1) out *= b;
    b *= b;
  }
  return out;
}

inline double to_double(const Rational& x) { return x.convert_to<double>(); }
inline double to_double(const Integer& x) { return x.convert_to<double>(); }

inline long to_long(const Integer& x) { return x.convert_to<long>(); }

/// Renders p/q with the denominator omitted when it equals one.
inline std::string format_rational(const Rational& x) {
  std::string s = numerator(x).str();
  if (denominator(x) != 1) s += "/" + denominator(x).str();
  return s;
}

inline std::string format_integer(const Integer& x) { return x.str(); }

/// Parses "p", "-p", or "p/q" with an optional sign on the numerator.
inline Rational parse_rational(const std::string& text) {
  require(!text.empty(), ErrorKind::structural, "empty rational literal");
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rational(Integer(text));
    Integer num(text.substr(0, slash));
    Integer den(text.substr(slash + 1));
    require(den != 0, ErrorKind::structural, "zero denominator in '" + text + "'");
    return Rational(num, den);
  } catch (const std::runtime_error&) {
    fail(ErrorKind::structural, "bad rational literal '" + text + "'");
  }
}

} // namespace reebidx
