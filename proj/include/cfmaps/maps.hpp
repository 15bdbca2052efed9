#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "cfmaps/bigint.hpp"
#include "cfmaps/continued_fraction.hpp"
#include "cfmaps/errors.hpp"
#include "cfmaps/mobius.hpp"

namespace cfmaps {

/// The parameter alpha of T_alpha. For rational alpha the stored expansion
/// (MINUS or PLUS) selects which of the two maps is meant.
struct AlphaParam {
  ContinuedFraction cf;

  AlphaParam() = default;
  AlphaParam(ContinuedFraction x) : cf(std::move(x)) {}  // NOLINT: implicit on purpose

  static AlphaParam gauss() { return {ContinuedFraction::zero()}; }
  static AlphaParam fibonacci() { return {ContinuedFraction::periodic({}, {1})}; }
  static AlphaParam one() { return {ContinuedFraction::finite({1})}; }
};

enum class BranchKind { interior, boundary };

/// An inverse branch of T_alpha. INTERIOR(k, i) is y -> [0; n_1..n_{k-1}, i + y],
/// BOUNDARY(k) is y -> [0; n_1..n_k, 1/y] (matrix (p_k, p_{k-1}; q_k, q_{k-1})).
struct Branch {
  MobiusMap map;
  BranchKind kind = BranchKind::boundary;
  std::size_t depth = 1;
  std::uint64_t index = 0;  // i for interior branches
};

namespace detail {

/// (p_j, q_j) of alpha for j = -1..depth, stored at offset j + 1.
struct ConvergentTable {
  std::vector<BigInt> p{1, 0}, q{0, 1};

  void extend(const ContinuedFraction& alpha, std::size_t depth) {
    while (p.size() < depth + 2) {
      const std::size_t j = p.size() - 1;  // next index to fill
      const Digit d = alpha.digit(j);
      if (d.is_inf()) throw std::logic_error("convergent past the end of a rational alpha");
      p.push_back(BigInt(d.value()) * p[j] + p[j - 1]);
      q.push_back(BigInt(d.value()) * q[j] + q[j - 1]);
    }
  }
  const BigInt& pk(std::ptrdiff_t j) const { return p.at(static_cast<std::size_t>(j + 1)); }
  const BigInt& qk(std::ptrdiff_t j) const { return q.at(static_cast<std::size_t>(j + 1)); }
};

}  // namespace detail

inline MobiusMap interior_branch(const ContinuedFraction& alpha, std::size_t k, std::uint64_t i) {
  detail::ConvergentTable t;
  t.extend(alpha, k - 1);
  const auto j = static_cast<std::ptrdiff_t>(k);
  return {t.pk(j - 1), BigInt(i) * t.pk(j - 1) + t.pk(j - 2), t.qk(j - 1), BigInt(i) * t.qk(j - 1) + t.qk(j - 2)};
}

inline MobiusMap boundary_branch(const ContinuedFraction& alpha, std::size_t k) {
  detail::ConvergentTable t;
  t.extend(alpha, k);
  const auto j = static_cast<std::ptrdiff_t>(k);
  return {t.pk(j), t.pk(j - 1), t.qk(j), t.qk(j - 1)};
}

/// Outcome of the digit comparison in T_alpha.
struct StepInfo {
  /// No disagreement: x = alpha, or x is rational with an initial segment of alpha.
  bool agrees = false;
  BranchKind kind = BranchKind::boundary;
  std::size_t k = 0;   // first index where the digits differ
  Digit x_digit;       // m_k
  Digit alpha_digit;   // n_k
  ContinuedFraction image;
};

namespace detail {

inline std::size_t period_len(const ContinuedFraction& x) { return x.is_periodic() ? x.period().size() : 1; }

/// Index past which two non-truncated sequences can no longer first differ.
inline std::size_t agreement_horizon(const ContinuedFraction& a, const ContinuedFraction& b) {
  return std::max(a.head().size(), b.head().size()) + std::lcm(period_len(a), period_len(b)) + 1;
}

}  // namespace detail

/// Compare x = [0; m_1, ...] with alpha = [0; n_1, ...] and apply T_alpha.
inline StepInfo t_alpha_analyse(const AlphaParam& alpha, const ContinuedFraction& x) {
  const bool exact = !alpha.cf.is_truncated() && !x.is_truncated();
  const std::size_t horizon = exact ? detail::agreement_horizon(alpha.cf, x) : std::numeric_limits<std::size_t>::max();
  StepInfo info;
  for (std::size_t k = 1; k <= horizon; ++k) {
    const Digit n = alpha.cf.digit(k);
    const Digit m = x.digit(k);
    if (n == m) {
      if (n.is_inf()) break;
      continue;
    }
    info.k = k;
    info.x_digit = m;
    info.alpha_digit = n;
    if (n > m) {
      info.kind = BranchKind::interior;
      info.image = x.suffix(k);
    } else {
      info.kind = BranchKind::boundary;
      info.image = x.suffix(k - 1).with_first_digit(digit_difference(m, n));
    }
    return info;
  }
  info.agrees = true;
  info.image = ContinuedFraction::zero();
  return info;
}

inline ContinuedFraction t_alpha_step(const AlphaParam& alpha, const ContinuedFraction& x) {
  return t_alpha_analyse(alpha, x).image;
}

inline ContinuedFraction t_alpha_iterate(const AlphaParam& alpha, ContinuedFraction x, std::size_t n) {
  for (std::size_t i = 0; i < n && !x.is_zero(); ++i) x = t_alpha_step(alpha, x);
  return x;
}

/// The inverse branch that carries T_alpha(x) back to x.
inline Branch branch_of(const AlphaParam& alpha, const StepInfo& info) {
  if (info.agrees) throw UndefinedDerivative("x has no branch: it agrees with alpha");
  if (info.kind == BranchKind::interior)
    return {interior_branch(alpha.cf, info.k, info.x_digit.value()), BranchKind::interior, info.k, info.x_digit.value()};
  return {boundary_branch(alpha.cf, info.k), BranchKind::boundary, info.k, 0};
}

inline Branch branch_of(const AlphaParam& alpha, const ContinuedFraction& x) {
  return branch_of(alpha, t_alpha_analyse(alpha, x));
}

/// log|T_alpha'(x)| = 2 log|C y + D| at y = T_alpha(x), with (C, D) the bottom
/// row of the branch through x. At the left end of a branch (y = 0) this is the
/// one-sided derivative.
inline double deriv_at(const AlphaParam& alpha, const StepInfo& info) {
  if (info.agrees) throw UndefinedDerivative("T_alpha is not differentiable where x agrees with alpha");
  const Branch b = branch_of(alpha, info);
  const double y = cf_value_fast(info.image);
  // log(C y + D) = log C + log(y + D/C) keeps huge convergents in range.
  if (b.map.c == 0) return 2.0 * log_abs(b.map.d);
  return 2.0 * (log_abs(b.map.c) + std::log(y + to_double(b.map.d, b.map.c)));
}

inline double deriv_at(const AlphaParam& alpha, const ContinuedFraction& x) {
  if (x.is_zero()) throw UndefinedDerivative("T_alpha'(0) is undefined");
  return deriv_at(alpha, t_alpha_analyse(alpha, x));
}

struct OrbitRecord {
  std::vector<ContinuedFraction> states;
  std::vector<double> numeric_shadow;
  double log_deriv_sum = 0.0;
  std::size_t log_deriv_terms = 0;
  std::optional<std::size_t> hit_zero_at;
};

inline OrbitRecord orbit(const AlphaParam& alpha, const ContinuedFraction& x, std::size_t n) {
  OrbitRecord rec;
  rec.states.push_back(x);
  rec.numeric_shadow.push_back(cf_value(x, 64).value);
  for (std::size_t step = 0; step < n; ++step) {
    const ContinuedFraction& cur = rec.states.back();
    if (cur.is_zero()) {
      rec.hit_zero_at = step;
      break;
    }
    StepInfo info = t_alpha_analyse(alpha, cur);
    if (!info.agrees) {
      rec.log_deriv_sum += deriv_at(alpha, info);
      ++rec.log_deriv_terms;
    }
    rec.states.push_back(std::move(info.image));
    rec.numeric_shadow.push_back(cf_value(rec.states.back(), 64).value);
  }
  if (!rec.hit_zero_at && rec.states.back().is_zero()) rec.hit_zero_at = rec.states.size() - 1;
  return rec;
}

/// T_alpha^n(x) = x as digit sequences. For truncated x the known digits of
/// both sides are compared.
inline bool is_periodic_point(const AlphaParam& alpha, const ContinuedFraction& x, std::size_t n) {
  if (n < 1) throw std::domain_error("is_periodic_point needs n >= 1");
  const ContinuedFraction y = t_alpha_iterate(alpha, x, n);
  if (!x.is_truncated() && !y.is_truncated()) return x == y;
  const std::size_t common = std::min(x.known_digits(), y.known_digits());
  if (common == 0) throw TruncationExhausted("no settled digits to compare");
  for (std::size_t i = 1; i <= common; ++i)
    if (x.digit(i) != y.digit(i)) return false;
  return true;
}

/// x_k = [0; 1, (1_{k-1}, 2)], the k-th fixed point of the Fibonacci map.
inline ContinuedFraction fibonacci_fixed_point(long k) {
  if (k < 1) throw std::domain_error("fibonacci_fixed_point needs k >= 1");
  std::vector<ContinuedFraction::value_type> period(static_cast<std::size_t>(k - 1), 1);
  period.push_back(2);
  return ContinuedFraction::periodic({1}, std::move(period));
}

/// Orbit of a finite expansion over a digit cursor, for long Lyapunov runs.
/// `digits` must outlive the cursor.
/// The state is [0; first, digits[pos+1], digits[pos+2], ...]; nothing is
/// copied per step and alpha's convergents are kept as (log q_j, q_{j-1}/q_j).
class FastOrbit {
 public:
  FastOrbit(const AlphaParam& alpha, const std::vector<std::uint64_t>& digits)
      : alpha_(alpha.cf), digits_(digits) {
    if (!digits_.empty()) first_ = digits_[0];
    else zero_ = true;
  }

  bool at_zero() const { return zero_; }

  /// Advances one step; returns log|T'| at the old state, or nullopt when the
  /// state is 0 or agrees with alpha (the orbit stops there).
  std::optional<double> step() {
    if (zero_) return std::nullopt;
    for (std::size_t k = 1;; ++k) {
      const Digit n = alpha_.digit(k);
      const std::uint64_t m = state_digit(k);
      if (n.value() == m) {
        if (n.is_inf()) {
          zero_ = true;
          return std::nullopt;
        }
        continue;
      }
      if (n.value() > m) {
        // interior: C = q_{k-1}, D = m q_{k-1} + q_{k-2}
        advance(k);
        ensure(k - 1);
        return 2.0 * (logq_[k - 1] + std::log(static_cast<double>(m) + value() + ratio_[k - 1]));
      }
      // boundary: C = q_k, D = q_{k-1}
      ensure(k);
      if (m == Digit::kInfValue) {
        zero_ = true;
        return 2.0 * (logq_[k] + std::log(ratio_[k]));
      }
      const std::uint64_t rest = m - n.value();
      advance(k - 1);
      first_ = rest;
      return 2.0 * (logq_[k] + std::log(value() + ratio_[k]));
    }
  }

 private:
  std::uint64_t state_digit(std::size_t k) const {
    if (k == 1) return first_;
    const std::size_t idx = pos_ + k - 1;
    return idx < digits_.size() ? digits_[idx] : Digit::kInfValue;
  }

  void advance(std::size_t drop) {
    if (drop == 0) return;
    pos_ += drop;
    if (pos_ >= digits_.size()) zero_ = true;
    else first_ = digits_[pos_];
  }

  /// Value of the current state from its first 40 digits.
  double value() const {
    if (zero_) return 0.0;
    const std::size_t end = std::min(digits_.size(), pos_ + 40);
    double t = 0.0;
    for (std::size_t idx = end; idx-- > pos_ + 1;) t = 1.0 / (static_cast<double>(digits_[idx]) + t);
    return 1.0 / (static_cast<double>(first_) + t);
  }

  // logq_[j] = log q_j, ratio_[j] = q_{j-1}/q_j for j >= 0 (q_{-1} = 0, q_0 = 1).
  void ensure(std::size_t j) {
    while (logq_.size() <= j) {
      const std::size_t next = logq_.size();
      const Digit d = alpha_.digit(next);
      if (d.is_inf()) throw std::logic_error("convergent past the end of a rational alpha");
      // q_next / q_{next-1} = d + q_{next-2}/q_{next-1}
      const double growth = static_cast<double>(d.value()) + ratio_[next - 1];
      logq_.push_back(logq_[next - 1] + std::log(growth));
      ratio_.push_back(1.0 / growth);
    }
  }

  ContinuedFraction alpha_;
  const std::vector<std::uint64_t>& digits_;
  std::size_t pos_ = 0;
  std::uint64_t first_ = 0;
  bool zero_ = false;
  std::vector<double> logq_{0.0};
  std::vector<double> ratio_{0.0};
};

}  // namespace cfmaps
