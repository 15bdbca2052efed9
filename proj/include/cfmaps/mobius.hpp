#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "cfmaps/bigint.hpp"
#include "cfmaps/continued_fraction.hpp"
#include "cfmaps/errors.hpp"

namespace cfmaps {

/// y -> (a y + b)/(c y + d) with integer entries and determinant +-1.
struct MobiusMap {
  BigInt a = 1, b = 0, c = 0, d = 1;

  static MobiusMap identity() { return {}; }
  static MobiusMap translation() { return {1, 1, 0, 1}; }  // T: y -> y + 1
  static MobiusMap inversion() { return {0, 1, 1, 0}; }    // U: y -> 1/y
  static MobiusMap translation(const BigInt& n) { return {1, n, 0, 1}; }

  BigInt det() const { return a * d - b * c; }

  friend bool operator==(const MobiusMap&, const MobiusMap&) = default;
};

/// m1 o m2.
inline MobiusMap mobius_compose(const MobiusMap& m1, const MobiusMap& m2) {
  return {m1.a * m2.a + m1.b * m2.c, m1.a * m2.b + m1.b * m2.d,
          m1.c * m2.a + m1.d * m2.c, m1.c * m2.b + m1.d * m2.d};
}

inline MobiusMap operator*(const MobiusMap& m1, const MobiusMap& m2) { return mobius_compose(m1, m2); }

inline double mobius_apply(const MobiusMap& m, double y) {
  const double den = to_double(m.c) * y + to_double(m.d);
  if (den == 0.0) {
    const double pole = m.c == 0 ? 0.0 : -to_double(m.d, m.c);
    throw PoleError("Mobius map evaluated at its pole", pole);
  }
  return (to_double(m.a) * y + to_double(m.b)) / den;
}

inline Rational mobius_apply(const MobiusMap& m, const Rational& y) {
  const Rational den = Rational(m.c) * y + Rational(m.d);
  if (den == 0) throw PoleError("Mobius map evaluated at its pole", to_double(y));
  return (Rational(m.a) * y + Rational(m.b)) / den;
}

/// |c y + d|^{-2s}: the Jacobian factor of the weight-2s slash action.
inline double mobius_weight(const MobiusMap& m, double y, double s) {
  const double den = std::fabs(to_double(m.c) * y + to_double(m.d));
  if (den == 0.0) throw PoleError("slash weight evaluated at the pole", y);
  return std::pow(den, -2.0 * s);
}

inline std::string to_string(const MobiusMap& m) {
  std::ostringstream os;
  os << '(' << m.a << ',' << m.b << ';' << m.c << ',' << m.d << ')';
  return os.str();
}

struct ConvergentSequence {
  /// maps[k-1] is y -> [0; d_1, ..., d_k, y] = (p_k y + p_{k-1})/(q_k y + q_{k-1}).
  std::vector<MobiusMap> maps;
  /// Fewer than the requested depth were available (finite expansion).
  bool short_sequence = false;

  const BigInt& numerator(std::size_t k) const { return maps.at(k - 1).a; }
  const BigInt& denominator(std::size_t k) const { return maps.at(k - 1).c; }
};

/// Convergent maps of x to the given depth, unrolling periods as needed.
inline ConvergentSequence convergents(const ContinuedFraction& x, std::size_t depth) {
  if (depth < 1) throw std::domain_error("convergents needs depth >= 1");
  ConvergentSequence out;
  out.maps.reserve(depth);
  BigInt p_prev = 1, q_prev = 0;  // p_{-1}, q_{-1}
  BigInt p = 0, q = 1;            // p_0, q_0
  for (std::size_t k = 1; k <= depth; ++k) {
    const Digit dk = x.digit(k);
    if (dk.is_inf()) {
      out.short_sequence = true;
      break;
    }
    BigInt p_next = BigInt(dk.value()) * p + p_prev;
    BigInt q_next = BigInt(dk.value()) * q + q_prev;
    p_prev = std::move(p);
    q_prev = std::move(q);
    p = std::move(p_next);
    q = std::move(q_next);
    out.maps.push_back({p, p_prev, q, q_prev});
  }
  return out;
}

struct ApproxValue {
  double value = 0.0;
  double error_bound = 0.0;
};

/// p_k/q_k at k = min(depth, length), with |x - p_k/q_k| <= error_bound.
inline ApproxValue cf_value(const ContinuedFraction& x, std::size_t depth) {
  if (depth < 1) throw std::domain_error("cf_value needs depth >= 1");
  if (x.is_zero()) return {0.0, 0.0};
  BigInt p_prev = 1, q_prev = 0, p = 0, q = 1;
  std::size_t k = 0;
  for (; k < depth; ++k) {
    if (k + 1 > x.known_digits()) break;
    const Digit dk = x.digit(k + 1);
    if (dk.is_inf()) break;
    BigInt p_next = BigInt(dk.value()) * p + p_prev;
    BigInt q_next = BigInt(dk.value()) * q + q_prev;
    p_prev = std::move(p);
    q_prev = std::move(q);
    p = std::move(p_next);
    q = std::move(q_next);
  }
  ApproxValue out{to_double(p, q), 0.0};
  if (k + 1 > x.known_digits()) {
    // q_{k+1} >= q_k + q_{k-1} whatever the next digit is.
    out.error_bound = 1.0 / (to_double(q) * to_double(BigInt(q + q_prev)));
  } else if (!x.digit(k + 1).is_inf()) {
    const BigInt q_next = BigInt(x.digit(k + 1).value()) * q + q_prev;
    out.error_bound = 1.0 / (to_double(q) * to_double(q_next));
  }
  return out;
}

/// Value of x from its digits by backward recurrence; accurate to a few ulps
/// once `depth` covers the digits that matter in double precision.
inline double cf_value_fast(const ContinuedFraction& x, std::size_t depth = 64) {
  double t = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 1; i <= depth && i <= x.known_digits(); ++i) {
    if (x.digit(i).is_inf()) break;
    n = i;
  }
  for (std::size_t i = n; i >= 1; --i) t = 1.0 / (static_cast<double>(x.digit(i).value()) + t);
  return t;
}

}  // namespace cfmaps
