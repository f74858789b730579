#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace brp {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(double r) { return r; }

// Exact: every finite double is a dyadic rational.
inline Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("rational_from_double: non-finite input");
  if (x == 0.0) return Rational(0);
  int exp = 0;
  double m = std::frexp(x, &exp);                  // x = m * 2^exp, |m| in [0.5, 1)
  auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));  // integer, |mant| < 2^53
  Rational r(mant);
  int shift = exp - 53;
  if (shift > 0)
    r *= Rational(BigInt(1) << shift);
  else if (shift < 0)
    r /= Rational(BigInt(1) << (-shift));
  return r;
}

inline Rational pow_int(const Rational& base, int n) {
  if (n < 0) return 1 / pow_int(base, -n);
  Rational acc(1), b = base;
  for (; n > 0; n >>= 1) {
    if (n & 1) acc *= b;
    if (n > 1) b *= b;
  }
  return acc;
}

inline double pow_int(double base, int n) { return std::pow(base, n); }

inline Rational abs_val(const Rational& r) { return r < 0 ? Rational(-r) : r; }
inline double abs_val(double r) { return std::fabs(r); }

// Scalar adaptors used by the templated algebra (S is Rational or double).
template <class S>
inline S scalar_from_rational(const Rational& r);
template <>
inline Rational scalar_from_rational<Rational>(const Rational& r) { return r; }
template <>
inline double scalar_from_rational<double>(const Rational& r) { return to_double(r); }

template <class S>
inline Rational scalar_to_rational(const S& s);
template <>
inline Rational scalar_to_rational<Rational>(const Rational& s) { return s; }
template <>
inline Rational scalar_to_rational<double>(const double& s) { return rational_from_double(s); }

inline std::string rational_to_string(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

inline Rational rational_from_string(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rational(BigInt(s));
  BigInt num(s.substr(0, slash)), den(s.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("rational_from_string: zero denominator");
  return Rational(num) / Rational(den);
}

}  // namespace brp
