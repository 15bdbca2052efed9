#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "cfmaps/continued_fraction.hpp"
#include "cfmaps/errors.hpp"

namespace cfmaps {

/// `0`, `[0;2,2]`, `[0;1,(1,2)]`, `[0;2,2,...]`.
inline std::string format_cf(const ContinuedFraction& x) {
  if (x.is_zero()) return "0";
  std::string out = "[0;";
  bool first = true;
  auto put = [&](const std::string& s) {
    if (!first) out += ',';
    out += s;
    first = false;
  };
  for (auto d : x.head()) put(std::to_string(d));
  switch (x.tail()) {
    case Tail::terminated:
      break;
    case Tail::periodic: {
      std::string group = "(";
      for (std::size_t i = 0; i < x.period().size(); ++i) {
        if (i) group += ',';
        group += std::to_string(x.period()[i]);
      }
      put(group + ")");
      break;
    }
    case Tail::truncated:
      put("...");
      break;
  }
  return out + "]";
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  int depth = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    else if (s[i] == ')') --depth;
    else if (s[i] == sep && depth == 0) {
      parts.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  parts.push_back(trim(s.substr(start)));
  return parts;
}

inline std::uint64_t parse_digit(std::string_view s) {
  s = trim(s);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v == 0 || v == Digit::kInfValue)
    throw ParseError("bad partial quotient '" + std::string(s) + "'");
  return v;
}

inline std::vector<std::uint64_t> parse_digit_list(std::string_view s) {
  std::vector<std::uint64_t> out;
  s = trim(s);
  if (s.empty()) return out;
  for (auto part : split(s, ',')) out.push_back(parse_digit(part));
  return out;
}

inline BigInt parse_bigint(std::string_view s) {
  s = trim(s);
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    throw ParseError("bad integer '" + std::string(s) + "'");
  return BigInt(std::string(s));
}

inline ContinuedFraction parse_bracketed(std::string_view body) {
  // body is what sits between '[' and ']'
  body = trim(body);
  if (body == "0") return ContinuedFraction::zero();
  if (body.size() < 2 || body[0] != '0' || trim(body.substr(1)).empty() || trim(body.substr(1))[0] != ';')
    throw ParseError("continued fraction text must start with '[0;'");
  std::string_view rest = trim(trim(body.substr(1)).substr(1));
  if (rest.empty()) return ContinuedFraction::zero();
  auto items = split(rest, ',');
  std::vector<std::uint64_t> head;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto item = items[i];
    const bool last = i + 1 == items.size();
    if (item == "...") {
      if (!last) throw ParseError("'...' must be the last item");
      return ContinuedFraction::truncated(std::move(head));
    }
    if (item == "inf" || item == "INF") {
      if (!last) throw ParseError("INF must be the last item");
      return ContinuedFraction::finite(std::move(head));
    }
    if (!item.empty() && item.front() == '(') {
      if (!last || item.back() != ')') throw ParseError("the period group must be the last item");
      auto period = parse_digit_list(item.substr(1, item.size() - 2));
      if (period.empty()) throw ParseError("empty period");
      return ContinuedFraction::periodic(std::move(head), std::move(period));
    }
    head.push_back(parse_digit(item));
  }
  return ContinuedFraction::finite(std::move(head));
}

}  // namespace detail

/// Parses the CF grammar plus rational and periodic shorthands:
///   [0;a,b,(p,q)]  [0;a,b,...]  0  1  p/q  p/q+  p/q-  (K)  (p,q)
///   periodic:a,b:(p,q)  and decimals such as 0.3, which become the dyadic
///   rational round(v*2^bits)/2^bits.
inline ContinuedFraction parse_cf(std::string_view text, unsigned decimal_bits = 64) {
  using detail::trim;
  std::string_view s = trim(text);
  if (s.empty()) throw ParseError("empty continued fraction text");
  if (s.front() == '[') {
    if (s.back() != ']') throw ParseError("missing ']'");
    return detail::parse_bracketed(s.substr(1, s.size() - 2));
  }
  if (s.front() == '(') {
    if (s.back() != ')') throw ParseError("missing ')'");
    auto period = detail::parse_digit_list(s.substr(1, s.size() - 2));
    if (period.empty()) throw ParseError("empty period");
    return ContinuedFraction::periodic({}, std::move(period));
  }
  if (s.rfind("periodic:", 0) == 0) {
    const auto body = s.substr(9);
    const auto colon = body.find(':');
    if (colon == std::string_view::npos) throw ParseError("periodic:prefix:(period) expected");
    auto head = detail::parse_digit_list(body.substr(0, colon));
    auto group = trim(body.substr(colon + 1));
    if (group.size() < 2 || group.front() != '(' || group.back() != ')') throw ParseError("period must be parenthesised");
    auto period = detail::parse_digit_list(group.substr(1, group.size() - 2));
    if (period.empty()) throw ParseError("empty period");
    return ContinuedFraction::periodic(std::move(head), std::move(period));
  }
  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    Variant variant = Variant::minus;
    std::string_view den = s.substr(slash + 1);
    if (!den.empty() && (den.back() == '+' || den.back() == '-')) {
      variant = den.back() == '+' ? Variant::plus : Variant::minus;
      den.remove_suffix(1);
    }
    const BigInt p = detail::parse_bigint(s.substr(0, slash));
    const BigInt q = detail::parse_bigint(den);
    if (q == 0 || p > q) throw ParseError("rational must lie in [0,1]");
    const BigInt g = boost::multiprecision::gcd(p, q);
    return cf_from_rational(p / g, q / g, variant);
  }
  if (s.find('.') != std::string_view::npos) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !(v >= 0.0 && v <= 1.0))
      throw ParseError("bad decimal '" + std::string(s) + "'");
    const BigInt den = BigInt(1) << decimal_bits;
    // v * 2^bits rounded, done exactly on the binary value of v.
    int exp = 0;
    const double mant = std::frexp(v, &exp);
    BigInt num = BigInt(static_cast<std::uint64_t>(std::ldexp(mant, 53)));
    const long shift = static_cast<long>(decimal_bits) + exp - 53;
    if (shift >= 0) num <<= static_cast<unsigned>(shift);
    else {
      const BigInt half = BigInt(1) << static_cast<unsigned>(-shift - 1);
      num = (num + half) >> static_cast<unsigned>(-shift);
    }
    const BigInt g = boost::multiprecision::gcd(num, den);
    return num == 0 ? ContinuedFraction::zero() : cf_from_rational(num / g, den / g);
  }
  if (s == "0") return ContinuedFraction::zero();
  if (s == "1") return ContinuedFraction::finite({1});
  throw ParseError("cannot parse continued fraction '" + std::string(s) + "'");
}

}  // namespace cfmaps
