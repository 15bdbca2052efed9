#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/multiprecision/cpp_int.hpp>

namespace cfmaps {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline std::size_t bit_length(const BigInt& v) {
  if (v == 0) return 0;
  return boost::multiprecision::msb(boost::multiprecision::abs(v)) + 1;
}

// Correctly scaled num/den in double, safe when both exceed the double range.
inline double to_double(const BigInt& num, const BigInt& den) {
  if (den == 0) return num == 0 ? std::numeric_limits<double>::quiet_NaN()
                                : (num > 0 ? std::numeric_limits<double>::infinity()
                                           : -std::numeric_limits<double>::infinity());
  if (num == 0) return 0.0;
  const bool negative = (num < 0) != (den < 0);
  BigInt n = boost::multiprecision::abs(num);
  BigInt d = boost::multiprecision::abs(den);
  // Shift so the integer quotient carries 64+ significant bits.
  const long shift = 66 - (static_cast<long>(bit_length(n)) - static_cast<long>(bit_length(d)));
  if (shift > 0) n <<= static_cast<unsigned>(shift);
  else if (shift < 0) d <<= static_cast<unsigned>(-shift);
  BigInt q, r;
  boost::multiprecision::divide_qr(n, d, q, r);
  if (r != 0) q |= 1;  // sticky bit for rounding
  // q has 66 or 67 bits; reduce to 64 keeping a sticky bit.
  const std::size_t qbits = bit_length(q);
  long extra = static_cast<long>(qbits) - 64;
  if (extra > 0) {
    const BigInt mask = (BigInt(1) << static_cast<unsigned>(extra)) - 1;
    const bool sticky = (q & mask) != 0;
    q >>= static_cast<unsigned>(extra);
    if (sticky) q |= 1;
  } else {
    extra = 0;
  }
  const auto top = q.convert_to<std::uint64_t>();
  // long double keeps all 64 bits on x86; the final cast rounds once to double.
  const long double mant = static_cast<long double>(top);
  const double out = static_cast<double>(std::ldexp(mant, static_cast<int>(extra - shift)));
  return negative ? -out : out;
}

inline double to_double(const BigInt& v) { return to_double(v, BigInt(1)); }

inline double to_double(const Rational& r) {
  return to_double(boost::multiprecision::numerator(r), boost::multiprecision::denominator(r));
}

// log|v| for integers of any size.
inline double log_abs(const BigInt& v) {
  const std::size_t bits = bit_length(v);
  if (bits < 1000) return std::log(std::fabs(v.convert_to<double>()));
  const unsigned shift = static_cast<unsigned>(bits - 64);
  const BigInt top = boost::multiprecision::abs(v) >> shift;
  return std::log(top.convert_to<double>()) + shift * std::log(2.0);
}

}  // namespace cfmaps
