#pragma once

#include <cmath>
#include <sstream>
#include <string>

#include "cfmaps/bigint.hpp"
#include "cfmaps/continued_fraction.hpp"
#include "cfmaps/errors.hpp"

namespace cfmaps {

/// a + b*sqrt(D) with rational a, b: the field Q(sqrt D), used to run Mobius
/// maps on surds exactly.
struct QuadraticNumber {
  Rational a = 0;
  Rational b = 0;
  BigInt radicand = 2;

  friend QuadraticNumber operator+(const QuadraticNumber& x, const QuadraticNumber& y) {
    return {x.a + y.a, x.b + y.b, x.radicand};
  }
  friend QuadraticNumber operator-(const QuadraticNumber& x, const QuadraticNumber& y) {
    return {x.a - y.a, x.b - y.b, x.radicand};
  }
  friend QuadraticNumber operator*(const QuadraticNumber& x, const QuadraticNumber& y) {
    const Rational d(x.radicand);
    return {x.a * y.a + x.b * y.b * d, x.a * y.b + x.b * y.a, x.radicand};
  }
  friend QuadraticNumber operator/(const QuadraticNumber& x, const QuadraticNumber& y) {
    const Rational d(x.radicand);
    const Rational norm = y.a * y.a - y.b * y.b * d;
    if (norm == 0) throw std::domain_error("division by zero in Q(sqrt D)");
    const QuadraticNumber conj{y.a, -y.b, y.radicand};
    QuadraticNumber num = x * conj;
    return {num.a / norm, num.b / norm, x.radicand};
  }
  friend bool operator==(const QuadraticNumber& x, const QuadraticNumber& y) {
    return x.a == y.a && x.b == y.b && x.radicand == y.radicand;
  }
  static QuadraticNumber rational(const Rational& r, const BigInt& radicand) { return {r, 0, radicand}; }
};

/// (p + q sqrt(D)) / r, reduced: r > 0, gcd(p, q, r) = 1, D > 1 with its
/// square factors pulled into q (by trial division; see square_split).
struct QuadraticSurd {
  BigInt p = 0, q = 0, r = 1, radicand = 2;

  static QuadraticSurd from(const QuadraticNumber& x);

  QuadraticNumber as_number() const {
    return {Rational(p, r), Rational(q, r), radicand};
  }

  double to_double() const {
    const double root = std::sqrt(cfmaps::to_double(radicand));
    if ((p < 0) != (q < 0) && p != 0 && q != 0) {
      // p + q sqrt D = (p^2 - q^2 D)/(p - q sqrt D) avoids cancellation.
      const BigInt norm = p * p - q * q * radicand;
      return cfmaps::to_double(norm) / ((cfmaps::to_double(p) - cfmaps::to_double(q) * root) * cfmaps::to_double(r));
    }
    return (cfmaps::to_double(p) + cfmaps::to_double(q) * root) / cfmaps::to_double(r);
  }

  /// Integer coefficients (A, B, C) with A x^2 + B x + C = 0.
  struct Polynomial {
    BigInt a, b, c;
  };
  Polynomial minimal_polynomial() const {
    // r x - p = q sqrt D  =>  r^2 x^2 - 2 p r x + p^2 - q^2 D = 0
    return {r * r, -2 * p * r, p * p - q * q * radicand};
  }

  friend bool operator==(const QuadraticSurd&, const QuadraticSurd&) = default;
};

/// n = f^2 * m with m free of prime squares below `limit` (and m not a perfect
/// square). Exact square-freeness is only guaranteed when n < limit^3.
inline std::pair<BigInt, BigInt> square_split(BigInt n, std::uint64_t limit = 100000) {
  BigInt f = 1;
  for (std::uint64_t pr = 2; pr <= limit; pr += (pr == 2 ? 1 : 2)) {
    const BigInt sq = BigInt(pr) * pr;
    if (sq > n) break;
    while (n % sq == 0) {
      n /= sq;
      f *= pr;
    }
  }
  const BigInt root = boost::multiprecision::sqrt(n);
  if (root * root == n) {
    f *= root;
    n = 1;
  }
  return {f, n};
}

inline QuadraticSurd QuadraticSurd::from(const QuadraticNumber& x) {
  auto [f, m] = square_split(x.radicand);
  Rational a = x.a;
  Rational b = x.b * Rational(f);
  if (m == 1) {
    a += b;
    b = 0;
    m = 2;  // any non-square; q = 0 makes it irrelevant
  }
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  const BigInt da = denominator(a), db = denominator(b);
  const BigInt l = boost::multiprecision::lcm(da, db);
  QuadraticSurd s;
  s.p = numerator(a) * (l / da);
  s.q = numerator(b) * (l / db);
  s.r = l;
  s.radicand = m;
  BigInt g = boost::multiprecision::gcd(boost::multiprecision::gcd(s.p, s.q), s.r);
  if (g > 1) {
    s.p /= g;
    s.q /= g;
    s.r /= g;
  }
  return s;
}

inline std::string to_string(const QuadraticSurd& s) {
  std::ostringstream os;
  os << '(' << s.p << (s.q < 0 ? " - " : " + ") << boost::multiprecision::abs(s.q) << "*sqrt(" << s.radicand
     << "))/" << s.r;
  return os.str();
}

/// Exact value of an eventually periodic expansion.
///
/// The purely periodic part y solves y = (p_{L-1} y + p_L)/(q_{L-1} y + q_L)
/// for the period block's convergents; the preperiod is then applied as a
/// Mobius map in Q(sqrt D).
inline QuadraticSurd periodic_value(const ContinuedFraction& x) {
  if (!x.is_periodic()) throw UnsupportedInput("periodic_value needs an eventually periodic expansion");
  BigInt pp = 1, qp = 0, p = 0, q = 1;  // (p_{k-1}, q_{k-1}), (p_k, q_k) over the period block
  for (auto d : x.period()) {
    BigInt pn = BigInt(d) * p + pp, qn = BigInt(d) * q + qp;
    pp = std::move(p);
    qp = std::move(q);
    p = std::move(pn);
    q = std::move(qn);
  }
  // q_{L-1} y^2 + (q_L - p_{L-1}) y - p_L = 0, positive root.
  const BigInt lin = q - pp;
  const BigInt disc = lin * lin + 4 * qp * p;
  QuadraticNumber y{Rational(-lin, 2 * qp), Rational(1, 2 * qp), disc};

  BigInt hp_prev = 1, hq_prev = 0, hp = 0, hq = 1;
  for (auto d : x.head()) {
    BigInt pn = BigInt(d) * hp + hp_prev, qn = BigInt(d) * hq + hq_prev;
    hp_prev = std::move(hp);
    hq_prev = std::move(hq);
    hp = std::move(pn);
    hq = std::move(qn);
  }
  // x = (P_j + P_{j-1} y)/(Q_j + Q_{j-1} y)
  const auto num = QuadraticNumber::rational(Rational(hp), disc) + QuadraticNumber::rational(Rational(hp_prev), disc) * y;
  const auto den = QuadraticNumber::rational(Rational(hq), disc) + QuadraticNumber::rational(Rational(hq_prev), disc) * y;
  return QuadraticSurd::from(num / den);
}

}  // namespace cfmaps
