#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cfmaps/bigint.hpp"
#include "cfmaps/errors.hpp"

namespace cfmaps {

/// A partial quotient: a positive integer, or the sentinel INF that closes the
/// expansion of a rational. INF compares greater than every finite digit.
class Digit {
 public:
  using value_type = std::uint64_t;
  static constexpr value_type kInfValue = std::numeric_limits<value_type>::max();

  constexpr Digit() = default;
  constexpr explicit Digit(value_type v) : v_(v) {
    if (v == 0) throw std::domain_error("partial quotients must be >= 1");
  }
  static constexpr Digit inf() { return Digit(kInfValue); }

  constexpr bool is_inf() const { return v_ == kInfValue; }
  constexpr value_type value() const { return v_; }

  constexpr auto operator<=>(const Digit&) const = default;

 private:
  value_type v_ = 1;
};

/// a - b for a > b, with INF - n = INF.
constexpr Digit digit_difference(Digit a, Digit b) {
  if (a.is_inf()) return Digit::inf();
  return Digit(a.value() - b.value());
}

enum class Tail { terminated, periodic, truncated };

/// Which of the two expansions of a rational: MINUS ends in a digit >= 2,
/// PLUS ends in 1.
enum class Variant { minus, plus };

/// x = [0; d_1, d_2, ...] in [0,1] as an exact digit sequence.
///
/// The head holds finite digits. A terminated tail means the next digit is
/// INF (x is rational); a periodic tail repeats `period` forever; a truncated
/// tail means the digits past the head are unknown.
///
/// Periodic values are kept canonical (minimal period, shortest preperiod), so
/// equality of canonical forms is equality of digit sequences. Rationals keep
/// whichever of their two expansions they were built with.
class ContinuedFraction {
 public:
  using value_type = Digit::value_type;

  ContinuedFraction() = default;  // zero, [0; INF]

  static ContinuedFraction zero() { return {}; }

  static ContinuedFraction finite(std::vector<value_type> digits) {
    ContinuedFraction cf;
    cf.head_ = std::move(digits);
    cf.tail_ = Tail::terminated;
    cf.check_head();
    return cf;
  }

  static ContinuedFraction periodic(std::vector<value_type> head, std::vector<value_type> period) {
    if (period.empty()) throw std::domain_error("periodic tail needs a non-empty period");
    ContinuedFraction cf;
    cf.head_ = std::move(head);
    cf.period_ = std::move(period);
    cf.tail_ = Tail::periodic;
    cf.check_head();
    for (auto d : cf.period_)
      if (d == 0 || d == Digit::kInfValue) throw std::domain_error("period digits must be finite and >= 1");
    cf.canonicalize();
    return cf;
  }

  static ContinuedFraction truncated(std::vector<value_type> digits) {
    ContinuedFraction cf;
    cf.head_ = std::move(digits);
    cf.tail_ = Tail::truncated;
    cf.check_head();
    return cf;
  }

  Tail tail() const { return tail_; }
  const std::vector<value_type>& head() const { return head_; }
  const std::vector<value_type>& period() const { return period_; }

  bool is_finite() const { return tail_ == Tail::terminated; }
  bool is_periodic() const { return tail_ == Tail::periodic; }
  bool is_truncated() const { return tail_ == Tail::truncated; }
  bool is_zero() const { return tail_ == Tail::terminated && head_.empty(); }

  /// Digits known exactly: all of them for finite/periodic, the head otherwise.
  std::size_t known_digits() const {
    return tail_ == Tail::truncated ? head_.size() : std::numeric_limits<std::size_t>::max();
  }

  /// The i-th partial quotient, 1-based.
  Digit digit(std::size_t i) const {
    if (i == 0) throw std::out_of_range("digits are 1-based");
    if (i <= head_.size()) return Digit(head_[i - 1]);
    switch (tail_) {
      case Tail::terminated:
        return Digit::inf();
      case Tail::periodic:
        return Digit(period_[(i - 1 - head_.size()) % period_.size()]);
      case Tail::truncated:
        break;
    }
    throw TruncationExhausted("digit " + std::to_string(i) + " of a truncated expansion with " +
                              std::to_string(head_.size()) + " known digits");
  }

  /// [0; d_{drop+1}, d_{drop+2}, ...]
  ContinuedFraction suffix(std::size_t drop) const {
    ContinuedFraction out;
    out.tail_ = tail_;
    if (drop <= head_.size()) {
      out.head_.assign(head_.begin() + static_cast<std::ptrdiff_t>(drop), head_.end());
      out.period_ = period_;
      return out;
    }
    switch (tail_) {
      case Tail::terminated:
        return zero();
      case Tail::truncated:
        throw TruncationExhausted("suffix past the known digits of a truncated expansion");
      case Tail::periodic: {
        const std::size_t shift = (drop - head_.size()) % period_.size();
        out.period_.assign(period_.begin() + static_cast<std::ptrdiff_t>(shift), period_.end());
        out.period_.insert(out.period_.end(), period_.begin(),
                           period_.begin() + static_cast<std::ptrdiff_t>(shift));
        return out;
      }
    }
    return out;
  }

  /// Same sequence with d_1 replaced by `first`. INF yields zero.
  ContinuedFraction with_first_digit(Digit first) const {
    if (first.is_inf()) return zero();
    ContinuedFraction out = suffix(1);
    out.head_.insert(out.head_.begin(), first.value());
    if (out.tail_ == Tail::periodic) out.canonicalize();
    return out;
  }

  /// Digit-sequence equality. Only meaningful between non-truncated values;
  /// truncated values compare their known prefixes and tails literally.
  friend bool operator==(const ContinuedFraction& a, const ContinuedFraction& b) {
    return a.tail_ == b.tail_ && a.head_ == b.head_ && a.period_ == b.period_;
  }

  /// For finite values: which of the two rational expansions this is.
  Variant variant() const {
    return (!head_.empty() && head_.back() == 1 && head_.size() > 1) ? Variant::plus : Variant::minus;
  }

  /// First `n` digits as a truncated expansion (finite values shorter than n
  /// stay finite).
  ContinuedFraction prefix(std::size_t n) const {
    if (tail_ == Tail::terminated && head_.size() <= n) return *this;
    std::vector<value_type> digits;
    digits.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) {
      if (tail_ == Tail::truncated && i > head_.size()) break;
      digits.push_back(digit(i).value());
    }
    return truncated(std::move(digits));
  }

 private:
  void check_head() const {
    for (auto d : head_)
      if (d == 0 || d == Digit::kInfValue)
        throw std::domain_error("head digits must be finite and >= 1");
  }

  void canonicalize() {
    // Minimal period.
    const std::size_t n = period_.size();
    for (std::size_t p = 1; p < n; ++p) {
      if (n % p != 0) continue;
      bool repeats = true;
      for (std::size_t i = p; i < n && repeats; ++i) repeats = period_[i] == period_[i - p];
      if (repeats) {
        period_.resize(p);
        break;
      }
    }
    // Absorb head digits that continue the period backwards.
    while (!head_.empty() && head_.back() == period_.back()) {
      std::rotate(period_.rbegin(), period_.rbegin() + 1, period_.rend());
      head_.pop_back();
    }
  }

  std::vector<value_type> head_;
  std::vector<value_type> period_;
  Tail tail_ = Tail::terminated;
};

/// Euclid's algorithm on p/q in [0,1]. MINUS gives the canonical expansion,
/// PLUS the one ending in 1.
inline ContinuedFraction cf_from_rational(const BigInt& p, const BigInt& q, Variant variant = Variant::minus) {
  if (q < 1 || p < 0 || p > q) throw std::domain_error("cf_from_rational needs 0 <= p <= q, q >= 1");
  if (boost::multiprecision::gcd(p, q) != 1 && p != 0)
    throw std::domain_error("cf_from_rational needs a reduced fraction");
  std::vector<ContinuedFraction::value_type> digits;
  BigInt num = p, den = q;
  while (num != 0) {
    BigInt a, r;
    boost::multiprecision::divide_qr(den, num, a, r);
    if (a >= BigInt(Digit::kInfValue))
      throw std::overflow_error("partial quotient exceeds the supported digit range");
    digits.push_back(a.convert_to<ContinuedFraction::value_type>());
    den = num;
    num = r;
  }
  if (variant == Variant::plus && !digits.empty()) {
    // [.., m] -> [.., m-1, 1]; x = 1 has no second form.
    if (digits.back() > 1) {
      digits.back() -= 1;
      digits.push_back(1);
    }
  }
  return ContinuedFraction::finite(std::move(digits));
}

inline ContinuedFraction cf_from_rational(const Rational& r, Variant variant = Variant::minus) {
  return cf_from_rational(boost::multiprecision::numerator(r), boost::multiprecision::denominator(r), variant);
}

/// Exact value of a finite expansion.
inline Rational cf_to_rational(const ContinuedFraction& x) {
  if (!x.is_finite()) throw UnsupportedInput("cf_to_rational needs a finite continued fraction");
  // Backward evaluation of 1/(d_1 + 1/(d_2 + ...)).
  BigInt num = 0, den = 1;  // value of the empty tail is 0 = 0/1
  const auto& h = x.head();
  for (auto it = h.rbegin(); it != h.rend(); ++it) {
    // t -> 1/(d + t) with t = num/den
    BigInt new_den = BigInt(*it) * den + num;
    num = den;
    den = std::move(new_den);
  }
  return Rational(num, den);
}

/// 1 - x, by the rule 1-[0;n1,n2,..] = [0;1,n1-1,n2,..] (n1 >= 2) or
/// [0;n2+1,n3,..] (n1 = 1). The rule flips the binary (Stern-Brocot) string,
/// so for rationals it changes the variant: 1 - [0;2] = [0;1,1].
inline ContinuedFraction cf_complement(const ContinuedFraction& x) {
  const Digit n1 = x.digit(1);
  if (n1.is_inf()) return ContinuedFraction::finite({1});  // 1 - 0 = 1
  if (n1.value() >= 2) {
    ContinuedFraction rest = x.with_first_digit(Digit(n1.value() - 1));
    // rest = [0; n1-1, n2, ...]; prepend the 1.
    std::vector<ContinuedFraction::value_type> head{1};
    head.insert(head.end(), rest.head().begin(), rest.head().end());
    switch (rest.tail()) {
      case Tail::terminated: return ContinuedFraction::finite(std::move(head));
      case Tail::periodic: return ContinuedFraction::periodic(std::move(head), rest.period());
      case Tail::truncated: return ContinuedFraction::truncated(std::move(head));
    }
  }
  // n1 = 1
  const Digit n2 = x.digit(2);
  if (n2.is_inf()) return ContinuedFraction::zero();  // 1 - 1 = 0
  return x.suffix(1).with_first_digit(Digit(n2.value() + 1));
}

}  // namespace cfmaps
