#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "cfmaps/continued_fraction.hpp"
#include "cfmaps/errors.hpp"
#include "cfmaps/maps.hpp"

namespace cfmaps {

/// Largest single input digit Jimm expands into a run of ones.
inline constexpr std::uint64_t kMaxJimmRun = std::uint64_t{1} << 24;

namespace detail {

/// Streaming form of the rewrite
///   [0; n_1, n_2, ...] -> [0; 1_{n_1-1}, 2, 1_{n_2-2}, 2, 1_{n_3-2}, ...]
/// with [.., m, 1_{-1}, n, ..] = [.., m+n-1, ..] and 1_0 dropped. The only state
/// is the last "2" (grown by merges), which stays open until a digit != 1
/// arrives.
class JimmTransducer {
 public:
  std::vector<std::uint64_t> out;

  void feed(std::uint64_t n) {
    if (first_) {
      first_ = false;
      ones(n - 1);
      pending_ = 2;
      return;
    }
    if (n == 1) {
      if (pending_ == Digit::kInfValue - 1) throw std::overflow_error("Jimm output digit overflow");
      ++pending_;
      return;
    }
    out.push_back(pending_);
    ones(n - 2);
    pending_ = 2;
  }

  /// Feed INF: the pending digit settles and ones follow forever. For x = 0
  /// nothing is pending and the output is all ones.
  void close_with_inf() {
    if (!first_) out.push_back(pending_);
    first_ = false;
  }

  std::uint64_t pending() const { return pending_; }
  bool started() const { return !first_; }

 private:
  void ones(std::uint64_t count) {
    if (count > kMaxJimmRun) throw UnsupportedInput("digit too large for the Jimm rewrite");
    out.insert(out.end(), count, 1);
  }

  bool first_ = true;
  std::uint64_t pending_ = 0;
};

}  // namespace detail

/// The Jimm involution J.
///
/// Finite inputs give [0; ..., (1)]; an input whose digits are eventually all
/// 1 gives a finite output; other periodic inputs give periodic outputs, found
/// by watching the open digit at period starts. Truncated inputs (and any
/// input cut at `depth` digits if not exact) give only settled digits.
inline ContinuedFraction jimm(const ContinuedFraction& x, std::size_t depth = 64) {
  if (x.is_truncated() && x.head().size() > depth) return jimm(x.prefix(depth), depth);
  detail::JimmTransducer t;
  for (auto d : x.head()) t.feed(d);
  switch (x.tail()) {
    case Tail::terminated:
      t.close_with_inf();
      return ContinuedFraction::periodic(std::move(t.out), {1});
    case Tail::truncated:
      return ContinuedFraction::truncated(std::move(t.out));
    case Tail::periodic:
      break;
  }
  const auto& period = x.period();
  if (std::all_of(period.begin(), period.end(), [](auto d) { return d == 1; })) {
    // The open digit grows forever: the output terminates.
    return ContinuedFraction::finite(std::move(t.out));
  }
  // After one pass over the period, the open digit at every period start is
  // 2 + (trailing ones of the period) - or more if the head ended in ones, so
  // run one pass first, then record one clean period of output.
  for (auto d : period) t.feed(d);
  const std::uint64_t state = t.pending();
  const std::size_t mark = t.out.size();
  for (auto d : period) t.feed(d);
  if (t.pending() != state) throw std::logic_error("Jimm transducer failed to cycle");
  std::vector<std::uint64_t> head(t.out.begin(), t.out.begin() + static_cast<std::ptrdiff_t>(mark));
  std::vector<std::uint64_t> cycle(t.out.begin() + static_cast<std::ptrdiff_t>(mark), t.out.end());
  return ContinuedFraction::periodic(std::move(head), std::move(cycle));
}

/// Digits i with 1 <= i <= count on which a and b agree, where count is the
/// smaller number of known digits (capped at `cap` for exact sequences).
struct SettledComparison {
  std::size_t compared = 0;
  bool agree = true;
};

inline SettledComparison compare_settled(const ContinuedFraction& a, const ContinuedFraction& b, std::size_t cap) {
  SettledComparison r;
  if (!a.is_truncated() && !b.is_truncated()) {
    r.agree = a == b;
    r.compared = cap;
    return r;
  }
  const std::size_t n = std::min({a.known_digits(), b.known_digits(), cap});
  for (std::size_t i = 1; i <= n; ++i) {
    const Digit da = a.digit(i), db = b.digit(i);
    ++r.compared;
    if (da != db) {
      r.agree = false;
      break;
    }
    if (da.is_inf()) break;
  }
  return r;
}

struct ConjugacyCheck {
  ContinuedFraction lhs;  // J(T_alpha(x))
  ContinuedFraction rhs;  // T_{J(alpha)}(J(x))
  std::size_t settled = 0;
  bool agree = true;
};

/// Both sides of T_{J(alpha)}(J x) = J T_alpha(x) on their settled digits.
inline ConjugacyCheck t_alpha_of_jimm_conjugate(const AlphaParam& alpha, const ContinuedFraction& x,
                                                std::size_t depth = 64) {
  ConjugacyCheck c;
  c.lhs = jimm(t_alpha_step(alpha, x), depth);
  c.rhs = t_alpha_step(AlphaParam{jimm(alpha.cf, depth)}, jimm(x, depth));
  const auto cmp = compare_settled(c.lhs, c.rhs, depth);
  c.settled = cmp.compared;
  c.agree = cmp.agree;
  return c;
}

}  // namespace cfmaps
