#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <vector>

#include "cfmaps/bigint.hpp"
#include "cfmaps/errors.hpp"
#include "cfmaps/hurwitz.hpp"
#include "cfmaps/transfer.hpp"

namespace cfmaps {

/// x_{k+1} = a x_k + x_{k-1} from x_0 = 0, x_1 = 1 (a = 1 Fibonacci, a = 2
/// Pell), memoized. Safe for concurrent readers; grows under a unique lock.
class RecurrenceTable {
 public:
  explicit RecurrenceTable(unsigned a) : a_(a), values_{0, 1} {}

  BigInt at(std::size_t k) {
    {
      std::shared_lock lock(mutex_);
      if (k < values_.size()) return values_[k];
    }
    std::unique_lock lock(mutex_);
    while (values_.size() <= k) {
      const std::size_t n = values_.size();
      values_.push_back(BigInt(a_) * values_[n - 1] + values_[n - 2]);
    }
    return values_[k];
  }

 private:
  unsigned a_;
  std::shared_mutex mutex_;
  std::vector<BigInt> values_;
};

inline RecurrenceTable& fibonacci_table() {
  static RecurrenceTable table(1);
  return table;
}

inline RecurrenceTable& pell_table() {
  static RecurrenceTable table(2);
  return table;
}

/// F_k with F_{-1} = 1, F_0 = 0.
inline BigInt fibonacci(long k) {
  if (k == -1) return 1;
  if (k < -1) throw std::domain_error("Fibonacci index below -1");
  return fibonacci_table().at(static_cast<std::size_t>(k));
}

inline BigInt pell(std::size_t k) { return pell_table().at(k); }

namespace detail {

inline constexpr std::size_t kAutoTerms = 0;
inline constexpr std::size_t kMaxSeriesTerms = 200000;

/// Sum of positive terms term(k), k = k0, k0+1, ..., with a geometric tail
/// whose ratio is the largest of the last two term ratios and the known
/// limiting ratio. With n_terms == 0 the sum runs until the next term drops
/// below 1e-18 of the total.
template <class Term>
SeriesValue geometric_series(Term term, std::size_t k0, std::size_t n_terms, double limit_ratio) {
  double sum = 0.0, last = 0.0, prev = 0.0, prev_ratio = 0.0, ratio = 0.0;
  const std::size_t cap = n_terms == kAutoTerms ? kMaxSeriesTerms : n_terms;
  std::size_t count = 0;
  for (std::size_t k = k0; count < cap; ++k, ++count) {
    const double v = term(k);
    sum += v;
    prev = last;
    last = v;
    if (count >= 1 && prev > 0) {
      prev_ratio = ratio;
      ratio = v / prev;
    }
    if (n_terms == kAutoTerms && count >= 8 && v < 1e-18 * sum) break;
  }
  const double r = std::max({ratio, prev_ratio, limit_ratio});
  if (!(r < 1.0)) throw DivergenceError("series terms are not decaying geometrically");
  return {sum, last * r / (1.0 - r) + 4e-16 * sum};
}

}  // namespace detail

/// zeta_alpha(s, t, y): L_{s,alpha} at the power function y^t. The defining
/// double sum over i = 0..n_k-1 has a k = 1, i = 0 term equal to y^{-2s-t},
/// cancelled by the counterterm, so this is exactly the branch-list sum.
/// For alpha = 0 that is sum_{n>=1} (y+n)^{-2s-t} = zeta(2s+t, y+1), the
/// shifted Hurwitz zeta at exponent 2s+t. For alpha = Phi* it is fib_hurwitz minus its
/// k = 0 term y^{-2s-t}.
inline SeriesValue zeta_alpha(const AlphaParam& alpha, double s, double t, double y, const TransferConfig& cfg = {}) {
  if (!(y > 0 && y <= 1)) throw std::domain_error("zeta_alpha needs y in (0,1]");
  if (alpha.cf.is_zero()) return hurwitz_zeta(2.0 * s + t, y + 1.0);
  const auto v = apply_transfer(alpha, s, power_function(t), y, cfg);
  return {v.value, v.tail_estimate};
}

/// zeta_{Phi*}(s, t, y) = sum_{k>=0} (F_k y + F_{k-1})^t / (F_{k+1} y + F_k)^{2s+t}.
inline SeriesValue fib_hurwitz(double s, double t, double y, std::size_t n_terms = detail::kAutoTerms) {
  if (!(s > 0)) throw DivergenceError("fib_hurwitz needs s > 0");
  if (!(y > 0)) throw std::domain_error("fib_hurwitz needs y > 0");
  const double z = 2.0 * s + t;
  auto term = [&](std::size_t k) {
    const auto kk = static_cast<long>(k);
    if (k < 1000) {
      const double num = to_double(fibonacci(kk)) * y + to_double(fibonacci(kk - 1));
      const double den = to_double(fibonacci(kk + 1)) * y + to_double(fibonacci(kk));
      return std::pow(num, t) * std::pow(den, -z);
    }
    const BigInt fk = fibonacci(kk), fk1 = fibonacci(kk + 1);
    const double log_num = log_abs(fk) + std::log(y + to_double(fibonacci(kk - 1), fk));
    const double log_den = log_abs(fk1) + std::log(y + to_double(fk, fk1));
    return std::exp(t * log_num - z * log_den);
  };
  return detail::geometric_series(term, 0, n_terms, std::pow(std::numbers::phi, -2.0 * s));
}

/// zeta_{Phi*}(s) = sum_{k>=1} F_k^{-s}.
inline SeriesValue fib_zeta(double s, std::size_t n_terms = detail::kAutoTerms) {
  if (!(s > 0)) throw DivergenceError("fib_zeta needs s > 0");
  auto term = [&](std::size_t k) { return std::exp(-s * log_abs(fibonacci(static_cast<long>(k)))); };
  return detail::geometric_series(term, 1, n_terms, std::pow(std::numbers::phi, -s));
}

/// zeta(s,t,1+1/x) - [x^{2s} zeta(s,t,x) - x^{-t}], each side summed on its
/// own. Shifting k by one in the series gives the bracket exactly: the k = 0
/// term of zeta(s,t,x) is x^{-2s-t}.
inline SeriesValue fib_functional_eq_residual(double s, double t, double x, std::size_t n_terms = detail::kAutoTerms) {
  if (!(x > 0)) throw std::domain_error("fib_functional_eq_residual needs x > 0");
  const auto lhs = fib_hurwitz(s, t, 1.0 + 1.0 / x, n_terms);
  const auto base = fib_hurwitz(s, t, x, n_terms);
  const double scale = std::pow(x, 2.0 * s);
  const double rhs = scale * base.value - std::pow(x, -t);
  const double rounding = 4e-16 * (std::fabs(lhs.value) + std::fabs(scale * base.value) + std::pow(x, -t));
  return {lhs.value - rhs, lhs.tail_bound + scale * base.tail_bound + rounding};
}

}  // namespace cfmaps
