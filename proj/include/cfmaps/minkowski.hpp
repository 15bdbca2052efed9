#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>

#include "cfmaps/bigint.hpp"
#include "cfmaps/continued_fraction.hpp"
#include "cfmaps/mobius.hpp"

namespace cfmaps {

/// num / 2^exponent, kept reduced (num odd unless exponent == 0).
struct Dyadic {
  BigInt num = 0;
  std::uint64_t exponent = 0;

  static Dyadic make(BigInt num, std::uint64_t exponent) {
    Dyadic d{std::move(num), exponent};
    d.reduce();
    return d;
  }

  Rational to_rational() const { return Rational(num, BigInt(1) << static_cast<unsigned>(exponent)); }
  double to_double() const {
    // Keep the mantissa finite when num itself overflows a double.
    const auto bits = bit_length(num);
    if (bits <= 1000) return std::ldexp(cfmaps::to_double(num), -static_cast<int>(exponent));
    const auto drop = bits - 64;
    return std::ldexp(cfmaps::to_double(BigInt(num >> static_cast<unsigned>(drop))),
                      static_cast<int>(drop) - static_cast<int>(exponent));
  }

  friend Dyadic operator+(const Dyadic& x, const Dyadic& y) {
    const std::uint64_t e = std::max(x.exponent, y.exponent);
    return make((x.num << static_cast<unsigned>(e - x.exponent)) + (y.num << static_cast<unsigned>(e - y.exponent)), e);
  }
  friend Dyadic operator-(const Dyadic& x, const Dyadic& y) {
    return x + Dyadic{-y.num, y.exponent};
  }
  friend bool operator==(const Dyadic& x, const Dyadic& y) { return x.num == y.num && x.exponent == y.exponent; }
  friend std::strong_ordering operator<=>(const Dyadic& x, const Dyadic& y) {
    const std::uint64_t e = std::max(x.exponent, y.exponent);
    const BigInt lhs = x.num << static_cast<unsigned>(e - x.exponent);
    const BigInt rhs = y.num << static_cast<unsigned>(e - y.exponent);
    return lhs < rhs ? std::strong_ordering::less : (lhs > rhs ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  void reduce() {
    if (num == 0) {
      exponent = 0;
      return;
    }
    const auto tz = boost::multiprecision::lsb(boost::multiprecision::abs(num));
    const auto drop = std::min<std::uint64_t>(tz, exponent);
    num >>= static_cast<unsigned>(drop);
    exponent -= drop;
  }
};

inline std::string to_string(const Dyadic& d) {
  if (d.exponent == 0) return d.num.str();
  return d.num.str() + "/" + (BigInt(1) << static_cast<unsigned>(d.exponent)).str();
}

/// Largest digit sum for which exact ?-values are materialised.
inline constexpr std::uint64_t kMaxDyadicExponent = std::uint64_t{1} << 24;

/// ?(x) = 2 sum_j (-1)^{j+1} 2^{-(n_1+...+n_j)}, exact for finite x.
/// Normalised so that ?(0) = 0, ?(1) = 1.
inline Dyadic minkowski_exact(const ContinuedFraction& x) {
  if (!x.is_finite()) throw UnsupportedInput("minkowski_exact needs a finite continued fraction");
  const auto& h = x.head();
  if (h.empty()) return {};
  std::uint64_t total = 0;
  for (auto d : h) {
    if (d > kMaxDyadicExponent || total > kMaxDyadicExponent) throw std::overflow_error("?-value exponent too large");
    total += d;
  }
  // value = sum_j (-1)^{j+1} 2^{1 - S_j} = [sum_j (-1)^{j+1} 2^{S_r - S_j + 1}] / 2^{S_r}
  BigInt num = 0;
  std::uint64_t partial = 0;
  for (std::size_t j = 0; j < h.size(); ++j) {
    partial += h[j];
    const BigInt term = BigInt(1) << static_cast<unsigned>(total - partial + 1);
    if (j % 2 == 0) num += term;
    else num -= term;
  }
  return Dyadic::make(std::move(num), total);
}

/// ?(x) for a periodic expansion, a rational: the head terms plus a geometric
/// series over periods, with ratio 2^{-S} (period length even) or -2^{-S}
/// (odd), S the period's digit sum.
inline Rational minkowski_periodic(const ContinuedFraction& x) {
  if (!x.is_periodic()) throw UnsupportedInput("minkowski_periodic needs a periodic continued fraction");
  Rational head_sum = 0, block = 0, scale = 1;
  long sign = 1;
  auto term = [&](std::uint64_t d) {
    if (d > kMaxDyadicExponent) throw std::overflow_error("?-value exponent too large");
    scale /= Rational(BigInt(1) << static_cast<unsigned>(d));
    return Rational(2 * sign) * scale;
  };
  for (auto d : x.head()) {
    head_sum += term(d);
    sign = -sign;
  }
  const Rational at_period = scale;
  const long sign_at_period = sign;
  for (auto d : x.period()) {
    block += term(d);
    sign = -sign;
  }
  const Rational period_factor = scale / at_period;
  const Rational ratio = sign == sign_at_period ? period_factor : -period_factor;
  return head_sum + block / (1 - ratio);
}

/// ?(x) from the first `depth` digits, with the truncation bound 2^{1-S_depth}.
inline ApproxValue minkowski_q(const ContinuedFraction& x, std::size_t depth) {
  if (depth < 1) throw std::domain_error("minkowski_q needs depth >= 1");
  ApproxValue out;
  double partial = 0.0;
  for (std::size_t j = 1; j <= depth; ++j) {
    if (j > x.known_digits()) {
      out.error_bound = std::ldexp(1.0, 1 - static_cast<int>(std::min(partial, 2000.0)));
      return out;
    }
    const Digit d = x.digit(j);
    if (d.is_inf()) return out;
    partial += static_cast<double>(d.value());
    const double term = std::ldexp(1.0, 1 - static_cast<int>(std::min(partial, 2000.0)));
    out.value += (j % 2 == 1) ? term : -term;
  }
  if (depth + 1 > x.known_digits() || !x.digit(depth + 1).is_inf())
    out.error_bound = std::ldexp(1.0, 1 - static_cast<int>(std::min(partial, 2000.0)));
  return out;
}

}  // namespace cfmaps
