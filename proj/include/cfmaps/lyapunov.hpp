#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "cfmaps/bigint.hpp"
#include "cfmaps/continued_fraction.hpp"
#include "cfmaps/errors.hpp"
#include "cfmaps/jimm.hpp"
#include "cfmaps/maps.hpp"

namespace cfmaps {

enum class LyapunovMethod { deriv_sum, qn_growth };

struct LyapunovEstimate {
  double value = 0.0;
  std::size_t n_steps = 0;
  std::size_t n_samples = 0;
  double std_error = 0.0;
  LyapunovMethod method = LyapunovMethod::deriv_sum;
  std::size_t discarded_samples = 0;
};

/// (1/m) sum of log|T'| over the first m <= n steps. m < n when the orbit
/// reached 0 (or landed on alpha itself) first.
struct OrbitAverage {
  double value = 0.0;
  std::size_t steps = 0;
  bool hit_zero = false;
};

namespace detail {

/// Runs up to n steps of a finite expansion, one log-derivative per step.
inline OrbitAverage fast_average(const AlphaParam& alpha, const std::vector<std::uint64_t>& digits, std::size_t n) {
  FastOrbit orbit(alpha, digits);
  double sum = 0.0;
  std::size_t m = 0;
  while (m < n) {
    const auto d = orbit.step();
    if (!d) break;
    sum += *d;
    ++m;
  }
  return {m ? sum / static_cast<double>(m) : 0.0, m, m < n};
}

/// 2 log q_m / m with m = min(n, number of digits).
inline OrbitAverage qn_average(const std::vector<std::uint64_t>& digits, std::size_t n) {
  const std::size_t m = std::min(n, digits.size());
  BigInt q_prev = 0, q = 1;
  for (std::size_t j = 0; j < m; ++j) {
    BigInt next = BigInt(digits[j]) * q + q_prev;
    q_prev = std::move(q);
    q = std::move(next);
  }
  return {m ? 2.0 * log_abs(q) / static_cast<double>(m) : 0.0, m, m < n};
}

}  // namespace detail

/// (1/n) sum_{k<n} log|T_alpha'(T^k x)|. If the orbit stops early the partial
/// average is returned with hit_zero set; x = 0 has no derivative at all.
inline OrbitAverage lyapunov_orbit(const AlphaParam& alpha, const ContinuedFraction& x, std::size_t n) {
  if (n < 1) throw std::domain_error("lyapunov_orbit needs n >= 1");
  if (x.is_zero()) throw UndefinedDerivative("T_alpha'(0) is undefined");
  if (x.is_finite()) return detail::fast_average(alpha, x.head(), n);
  ContinuedFraction cur = x;
  double sum = 0.0;
  std::size_t m = 0;
  for (; m < n && !cur.is_zero(); ++m) {
    StepInfo info = t_alpha_analyse(alpha, cur);
    if (info.agrees) break;
    sum += deriv_at(alpha, info);
    cur = std::move(info.image);
  }
  if (m == 0) throw UndefinedDerivative("x agrees with alpha");
  return {sum / static_cast<double>(m), m, m < n};
}

/// 2 log q_n(x) / n with exact q_n.
inline double lyapunov_qn(const ContinuedFraction& x, std::size_t n) {
  if (n < 1) throw std::domain_error("lyapunov_qn needs n >= 1");
  if (x.known_digits() < n || (x.is_finite() && x.head().size() < n))
    throw TruncationExhausted("lyapunov_qn needs n digits of x");
  const auto conv = convergents(x, n);
  return 2.0 * log_abs(conv.denominator(n)) / static_cast<double>(n);
}

struct MonteCarloOptions {
  LyapunovMethod method = LyapunovMethod::deriv_sum;
  /// Run the orbit of J(x) instead of x, J applied to the sample's digits.
  bool jimm_image = false;
  unsigned threads = 0;
  /// Redraws allowed per sample before giving up.
  std::size_t max_attempts = 64;
};

namespace detail {

/// Uniform dyadic k / 2^bits in (0,1), reduced, from the generator for
/// (seed, index, attempt).
inline std::vector<std::uint64_t> dyadic_sample_digits(std::uint64_t seed, std::size_t index, std::size_t attempt,
                                                       std::size_t bits) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(attempt)};
  std::mt19937_64 rng(seq);
  BigInt num = 0;
  for (std::size_t got = 0; got < bits; got += 64) {
    const std::size_t take = std::min<std::size_t>(64, bits - got);
    std::uint64_t word = rng();
    if (take < 64) word &= (std::uint64_t{1} << take) - 1;
    num = (num << take) | BigInt(word);
  }
  if (num == 0) return {};
  BigInt den = BigInt(1) << bits;
  const BigInt g = boost::multiprecision::gcd(num, den);
  return cf_from_rational(num / g, den / g).head();
}

/// The first `len` settled digits of J(x) for finite x (fewer if J(x) has
/// fewer settled digits). A long run of ones past `len` is cut short.
inline std::vector<std::uint64_t> jimm_prefix(const std::vector<std::uint64_t>& digits, std::size_t len) {
  JimmTransducer t;
  for (auto d : digits) {
    if (t.out.size() >= len) break;
    const std::size_t room = len - t.out.size();
    if (d > room + 2) {
      if (t.started()) t.out.push_back(t.pending());
      t.out.resize(std::max(t.out.size(), len), 1);
      break;
    }
    t.feed(d);
  }
  if (t.out.size() > len) t.out.resize(len);
  return std::move(t.out);
}

}  // namespace detail

/// Mean over n_samples uniform dyadic x of the n_steps orbit average, with the
/// standard error of the mean. A sample whose orbit stops before n_steps/2
/// steps is redrawn and counted in discarded_samples.
inline LyapunovEstimate monte_carlo_lyapunov(const AlphaParam& alpha, std::size_t n_samples, std::size_t n_steps,
                                             std::size_t bits, std::uint64_t seed, const MonteCarloOptions& opts = {}) {
  if (n_samples < 1 || n_steps < 1) throw std::domain_error("monte_carlo_lyapunov needs n_samples, n_steps >= 1");
  if (bits < 4 * n_steps)
    throw PrecisionBudgetError("need bits >= 4 * n_steps (" + std::to_string(4 * n_steps) + "), got " +
                               std::to_string(bits));
  std::vector<double> values(n_samples);
  std::vector<std::size_t> discarded(n_samples, 0);
  std::vector<std::exception_ptr> errors(n_samples);

  auto run = [&](std::size_t i) {
    for (std::size_t attempt = 0; attempt < opts.max_attempts; ++attempt) {
      auto digits = detail::dyadic_sample_digits(seed, i, attempt, bits);
      if (opts.jimm_image) digits = detail::jimm_prefix(digits, 4 * n_steps);
      if (!digits.empty()) {
        const OrbitAverage a = opts.method == LyapunovMethod::qn_growth ? detail::qn_average(digits, n_steps)
                                                                         : detail::fast_average(alpha, digits, n_steps);
        if (2 * a.steps >= n_steps) {
          values[i] = a.value;
          return;
        }
      }
      ++discarded[i];
    }
    throw PrecisionBudgetError("sample " + std::to_string(i) + " kept terminating early; raise bits");
  };

  auto worker = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < n_samples; i += step) {
      try {
        run(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_samples));
  if (threads == 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t, threads);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  LyapunovEstimate est;
  est.n_steps = n_steps;
  est.n_samples = n_samples;
  est.method = opts.method;
  double sum = 0.0;
  for (double v : values) sum += v;
  est.value = sum / static_cast<double>(n_samples);
  if (n_samples > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - est.value) * (v - est.value);
    est.std_error = std::sqrt(ss / static_cast<double>(n_samples - 1) / static_cast<double>(n_samples));
  }
  for (auto d : discarded) est.discarded_samples += d;
  return est;
}

}  // namespace cfmaps
