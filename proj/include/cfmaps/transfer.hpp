#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cfmaps/continued_fraction.hpp"
#include "cfmaps/errors.hpp"
#include "cfmaps/hurwitz.hpp"
#include "cfmaps/maps.hpp"
#include "cfmaps/minkowski.hpp"
#include "cfmaps/mobius.hpp"
#include "cfmaps/text.hpp"

namespace cfmaps {

/// A real function on an interval of the positive reals. Calls outside the
/// declared domain raise std::domain_error.
struct FunctionOracle {
  std::function<double(double)> f;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  bool lo_closed = false;
  bool hi_closed = false;

  bool contains(double y) const {
    const bool above = lo_closed ? y >= lo : y > lo;
    const bool below = hi_closed ? y <= hi : y < hi;
    return above && below;
  }
  double operator()(double y) const {
    if (!contains(y)) throw std::domain_error("function evaluated outside its domain at y = " + std::to_string(y));
    return f(y);
  }
};

struct TransferConfig {
  double s = 1.0;
  std::size_t depth_max = 400;
  std::uint64_t inner_max = 2000;  // explicit interior branches per depth
  double tail_tol = 1e-15;
  double lambda = 1.0;
};

/// Interior branches i = first..last of one depth, y -> M(i + y) with
/// M = (p_{k-1}, p_{k-2}; q_{k-1}, q_{k-2}). They accumulate at p_{k-1}/q_{k-1}
/// and are summed in closed form. `last` is empty for an INF digit of alpha.
struct BranchChain {
  std::size_t depth = 1;
  MobiusMap base;
  std::uint64_t first = 1;
  std::optional<std::uint64_t> last;
};

struct BranchFamily {
  AlphaParam alpha;
  double s = 1.0;
  std::vector<Branch> branches;
  std::vector<BranchChain> chains;
  /// Every branch is listed (rational alpha).
  bool complete = false;
  std::size_t depth_reached = 0;
  /// Bound on sum over dropped depths of sup_y |C y + D|^{-2s}.
  double depth_tail_mass = 0.0;

  struct Fast {
    double a, b, c, d;
  };
  std::vector<Fast> fast;  // double copies of branches[i].map
};

namespace detail {

inline BranchFamily::Fast fast_of(const MobiusMap& m) {
  return {to_double(m.a), to_double(m.b), to_double(m.c), to_double(m.d)};
}

inline constexpr std::uint64_t kNoEnd = std::numeric_limits<std::uint64_t>::max();

/// sum_{i=lo}^{top} (Q (i + y) + Q')^{-z}; top = kNoEnd for infinity.
inline SeriesValue chain_power_sum(double q, double q_prev, double y, double z, std::uint64_t lo, std::uint64_t top) {
  const bool infinite = top == kNoEnd;
  if (top < lo) return {};
  if (!infinite && top - lo < 64) {
    double s = 0.0;
    for (std::uint64_t i = lo; i <= top; ++i) s += std::pow(q * (static_cast<double>(i) + y) + q_prev, -z);
    return {s, 0.0};
  }
  const double shift = y + q_prev / q;
  const double scale = std::pow(q, -z);
  SeriesValue a = hurwitz_zeta(z, static_cast<double>(lo) + shift);
  if (!infinite) {
    const SeriesValue b = hurwitz_zeta(z, static_cast<double>(top) + 1.0 + shift);
    a.value -= b.value;
    a.tail_bound += b.tail_bound;
  }
  return {scale * a.value, scale * a.tail_bound};
}

}  // namespace detail

/// Inverse branches of T_alpha by depth: INTERIOR(k, i) for 1 <= i < n_k and
/// BOUNDARY(k) when n_k is finite. An INF digit ends the list with an infinite
/// chain. For irrational alpha the depth loop stops once the last block of
/// depths weighs less than tail_tol and the block-to-block ratio is below 0.9.
inline BranchFamily enumerate_branches(const AlphaParam& alpha, const TransferConfig& cfg) {
  if (cfg.depth_max < 1) throw std::invalid_argument("depth_max must be >= 1");
  if (!(cfg.tail_tol > 0)) throw std::invalid_argument("tail_tol must be > 0");
  if (!(cfg.s > 0.5)) throw DivergenceError("transfer operators need s > 1/2");
  BranchFamily fam;
  fam.alpha = alpha;
  fam.s = cfg.s;
  const double two_s = 2.0 * cfg.s;
  detail::ConvergentTable table;
  // Depth masses are compared in blocks of one period so that digit
  // patterns like (1,3) do not look like stalled decay.
  const std::size_t block = alpha.cf.is_periodic() ? std::max<std::size_t>(2, alpha.cf.period().size()) : 2;
  std::vector<double> masses;
  for (std::size_t k = 1; k <= cfg.depth_max; ++k) {
    table.extend(alpha.cf, k - 1);
    const Digit n = alpha.cf.digit(k);
    const auto kk = static_cast<std::ptrdiff_t>(k);
    const MobiusMap base{table.pk(kk - 1), table.pk(kk - 2), table.qk(kk - 1), table.qk(kk - 2)};
    const double qd = to_double(base.c), qpd = to_double(base.d);
    double mass = 0.0;

    const std::uint64_t interior_count = n.is_inf() ? cfg.inner_max : std::min(n.value() - 1, cfg.inner_max);
    for (std::uint64_t i = 1; i <= interior_count; ++i) {
      MobiusMap m{base.a, BigInt(i) * base.a + base.b, base.c, BigInt(i) * base.c + base.d};
      mass += std::pow(qd * static_cast<double>(i) + qpd, -two_s);
      fam.branches.push_back({std::move(m), BranchKind::interior, k, i});
    }
    if (n.is_inf() || n.value() - 1 > cfg.inner_max) {
      BranchChain chain{k, base, cfg.inner_max + 1, std::nullopt};
      if (!n.is_inf()) chain.last = n.value() - 1;
      mass += detail::chain_power_sum(qd, qpd, 0.0, two_s, chain.first, chain.last.value_or(detail::kNoEnd)).value;
      fam.chains.push_back(std::move(chain));
    }
    fam.depth_reached = k;
    if (n.is_inf()) {
      fam.complete = true;
      break;
    }
    table.extend(alpha.cf, k);
    MobiusMap boundary{table.pk(kk), table.pk(kk - 1), table.qk(kk), table.qk(kk - 1)};
    mass += std::pow(to_double(boundary.d), -two_s);
    fam.branches.push_back({std::move(boundary), BranchKind::boundary, k, 0});

    if (alpha.cf.is_finite() && k == alpha.cf.head().size()) {
      // The next digit is INF: one more depth, an infinite chain, and done.
      continue;
    }
    masses.push_back(mass);
    if (masses.size() >= 2 * block) {
      double recent = 0.0, before = 0.0;
      for (std::size_t j = 0; j < block; ++j) {
        recent += masses[masses.size() - 1 - j];
        before += masses[masses.size() - 1 - block - j];
      }
      const double r = recent / before;
      if (recent < cfg.tail_tol && r < 0.9) {
        fam.depth_tail_mass = recent * r / (1 - r);
        break;
      }
    }
    if (k == cfg.depth_max) throw DivergenceError("branch weights did not fall below tail_tol within depth_max");
  }
  fam.fast.reserve(fam.branches.size());
  for (const auto& b : fam.branches) fam.fast.push_back(detail::fast_of(b.map));
  return fam;
}

/// Branch families cached per (alpha, s, depth_max, inner_max, tail_tol).
/// Lookups are thread-safe; each family is built once.
class BranchCache {
 public:
  static BranchCache& global() {
    static BranchCache cache;
    return cache;
  }

  std::shared_ptr<const BranchFamily> get(const AlphaParam& alpha, const TransferConfig& cfg) {
    const std::string key = format_cf(alpha.cf) + "|" + std::to_string(cfg.s) + "|" + std::to_string(cfg.depth_max) +
                            "|" + std::to_string(cfg.inner_max) + "|" + std::to_string(cfg.tail_tol);
    std::shared_ptr<Entry> entry;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto& slot = entries_[key];
      if (!slot) slot = std::make_shared<Entry>();
      entry = slot;
    }
    std::call_once(entry->once, [&] { entry->family = std::make_shared<const BranchFamily>(enumerate_branches(alpha, cfg)); });
    if (!entry->family) throw std::runtime_error("branch enumeration failed earlier for " + key);
    return entry->family;
  }

 private:
  struct Entry {
    std::once_flag once;
    std::shared_ptr<const BranchFamily> family;
  };
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> entries_;
};

struct TransferValue {
  double value = 0.0;
  double tail_estimate = 0.0;
};

namespace detail {

struct ChainGeometry {
  double p, p_prev, q, q_prev;
  double limit;  // p/q
  double sigma;  // sign of image - limit
  double image(double z) const { return (p * z + p_prev) / (q * z + q_prev); }
};

inline ChainGeometry geometry(const BranchChain& c) {
  ChainGeometry g{to_double(c.base.a), to_double(c.base.b), to_double(c.base.c), to_double(c.base.d), 0.0, 0.0};
  g.limit = to_double(c.base.a, c.base.c);
  // image - p/q = (p' q - p q') / (q (q z + q'))
  g.sigma = (c.base.b * c.base.c - c.base.a * c.base.d) > 0 ? 1.0 : -1.0;
  return g;
}

/// Sum of w_i psi(image_i) over a chain, by Taylor expansion at the limit L:
/// psi(L) W0 + psi'(L) W1 + psi''(L) W2 / 2 with W_m = sum w_i (image_i - L)^m
/// in closed form. Derivatives are one-sided, from the side of the images.
/// The estimate is W0 times the third-order remainder at the first image.
inline TransferValue chain_sum(const BranchChain& chain, const FunctionOracle& psi, double y, double s) {
  const ChainGeometry g = geometry(chain);
  const double two_s = 2.0 * s;
  // image_i - L = sigma / (q den_i), den_i = q (i + y) + q'
  const auto w0 = chain_power_sum(g.q, g.q_prev, y, two_s, chain.first, chain.last.value_or(detail::kNoEnd));
  const auto w1 = chain_power_sum(g.q, g.q_prev, y, two_s + 1.0, chain.first, chain.last.value_or(detail::kNoEnd));
  const auto w2 = chain_power_sum(g.q, g.q_prev, y, two_s + 2.0, chain.first, chain.last.value_or(detail::kNoEnd));
  const double z0 = static_cast<double>(chain.first) + y;
  const double img0 = g.image(z0);
  const double delta = std::fabs(img0 - g.limit);
  if (!psi.contains(g.limit)) throw DivergenceError("branch accumulation point outside the function's domain");
  double h = 1e-3 * std::max(1.0, std::fabs(g.limit));
  while (h > delta && !psi.contains(g.limit + 3.0 * g.sigma * h)) h *= 0.5;
  const double f0 = psi(g.limit);
  const double f1 = psi(g.limit + g.sigma * h);
  const double f2 = psi(g.limit + 2.0 * g.sigma * h);
  const double f3 = psi(g.limit + 3.0 * g.sigma * h);
  const double d1 = g.sigma * (-11.0 * f0 + 18.0 * f1 - 9.0 * f2 + 2.0 * f3) / (6.0 * h);
  const double d2 = (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3) / (h * h);
  const double m1 = g.sigma / g.q, m2 = 1.0 / (g.q * g.q);
  TransferValue out;
  out.value = f0 * w0.value + d1 * m1 * w1.value + 0.5 * d2 * m2 * w2.value;
  const double e0 = img0 - g.limit;
  const double remainder = std::fabs(psi(img0) - f0 - d1 * e0 - 0.5 * d2 * e0 * e0);
  out.tail_estimate = w0.value * remainder + std::fabs(f0) * w0.tail_bound + std::fabs(d1 * m1) * w1.tail_bound +
                      std::fabs(d2 * m2) * w2.tail_bound;
  return out;
}

}  // namespace detail

/// (L_{s,alpha} psi)(y) = sum over the listed inverse branches of
/// |C y + D|^{-2s} psi(branch(y)). The branch list never includes the
/// counterterm, so psi is only evaluated at branch images. Valid for y >= 0.
inline TransferValue apply_transfer(const AlphaParam& alpha, double s, const FunctionOracle& psi, double y,
                                    TransferConfig cfg = {}) {
  if (!(y >= 0)) throw std::domain_error("apply_transfer needs y >= 0");
  cfg.s = s;
  const auto fam = BranchCache::global().get(alpha, cfg);
  const double two_s = 2.0 * s;
  double sum = 0.0, comp = 0.0, max_abs = 0.0;
  for (const auto& m : fam->fast) {
    const double den = m.c * y + m.d;
    const double v = psi((m.a * y + m.b) / den);
    max_abs = std::max(max_abs, std::fabs(v));
    // Kahan summation: thousands of terms of very different sizes.
    const double term = std::pow(den, -two_s) * v - comp;
    const double t = sum + term;
    comp = (t - sum) - term;
    sum = t;
  }
  TransferValue out{sum, 0.0};
  for (const auto& chain : fam->chains) {
    const auto c = detail::chain_sum(chain, psi, y, s);
    out.value += c.value;
    out.tail_estimate += c.tail_estimate;
  }
  out.tail_estimate += max_abs * fam->depth_tail_mass;
  out.tail_estimate += 1e-15 * std::fabs(out.value);
  return out;
}

/// psi(T_alpha(x)).
inline double koopman(const AlphaParam& alpha, const FunctionOracle& psi, const ContinuedFraction& x) {
  return psi(cf_value(t_alpha_step(alpha, x), 64).value);
}

// ---------------------------------------------------------------- densities

enum class Density { gauss, alpha_one, fibonacci, k_series };

/// psi_K(y) = sum_{i>=0} [ 1/((1+Kiy)(1+(Ki+1)y)) - 1/((y+Ki+K)(y+Ki+K+1)) ],
/// the invariant function of T_{[0;(K)]}. `terms` are summed directly; the rest
/// uses the asymptotic expansion of the digamma differences each half
/// telescopes into.
inline SeriesValue k_series(unsigned K, double y, std::size_t terms = 256) {
  if (K < 1) throw std::domain_error("K_SERIES needs K >= 1");
  if (!(y > 0)) throw std::domain_error("K_SERIES needs y > 0");
  const double k = K;
  double sum = 0.0;
  for (std::size_t i = 0; i < terms; ++i) {
    const double ki = k * static_cast<double>(i);
    sum += 1.0 / ((1.0 + ki * y) * (1.0 + (ki + 1.0) * y)) - 1.0 / ((y + ki + k) * (y + ki + k + 1.0));
  }
  // sum_{i>=N} [1/(i+a) - 1/(i+b)] = Psi(N+b) - Psi(N+a), asymptotically.
  auto digamma_gap = [](double x, double d, double& bound) {
    // Psi(x+d) - Psi(x) for large x
    const double x2 = x + d;
    double v = std::log1p(d / x) - (0.5 / x2 - 0.5 / x) - (1.0 / (12 * x2 * x2) - 1.0 / (12 * x * x)) +
               (1.0 / (120 * std::pow(x2, 4)) - 1.0 / (120 * std::pow(x, 4)));
    bound += std::fabs(1.0 / (252 * std::pow(x2, 6)) - 1.0 / (252 * std::pow(x, 6))) * 2;
    return v;
  };
  const double n = static_cast<double>(terms);
  double bound = 0.0;
  const double a1 = 1.0 / (k * y);
  const double t1 = digamma_gap(n + a1, 1.0 / k, bound) / (k * y * y);
  bound /= (k * y * y);
  double bound2 = 0.0;
  const double t2 = digamma_gap(n + (y + k) / k, 1.0 / k, bound2) / k;
  bound2 /= k;
  return {sum + t1 - t2, bound + bound2 + 1e-16 * std::fabs(sum)};
}

inline FunctionOracle closed_form_density(Density which, unsigned K = 1, std::size_t terms = 256) {
  switch (which) {
    case Density::gauss:
      return {[](double y) { return 1.0 / (std::log(2.0) * (1.0 + y)); }, -1.0};
    case Density::alpha_one:
      return {[](double y) { return 1.0 / y; }, 0.0};
    case Density::fibonacci:
      return {[](double y) { return 1.0 / (y * (y + 1.0)); }, 0.0};
    case Density::k_series:
      if (K < 1) throw std::domain_error("K_SERIES needs K >= 1");
      return {[K, terms](double y) { return k_series(K, y, terms).value; }, 0.0};
  }
  throw std::invalid_argument("unknown density");
}

inline FunctionOracle constant_function(double c) {
  return {[c](double) { return c; }, -std::numeric_limits<double>::infinity()};
}

inline FunctionOracle power_function(double t) {
  return {[t](double y) { return std::pow(y, t); }, 0.0, std::numeric_limits<double>::infinity(), t >= 0};
}

/// y -> psi(1 - y).
inline FunctionOracle reflected(const FunctionOracle& psi) {
  FunctionOracle out;
  out.f = [psi](double y) { return psi(1.0 - y); };
  out.lo = 1.0 - psi.hi;
  out.hi = 1.0 - psi.lo;
  out.lo_closed = psi.hi_closed;
  out.hi_closed = psi.lo_closed;
  return out;
}

// ------------------------------------------------------------ equivalences

enum class Equivalence { alpha1_to_gauss, half_plus_to_minus };

struct SidePair {
  TransferValue lhs, rhs;
};

/// ALPHA1_TO_GAUSS: (L_{s,1} psi)(y) against (L_{s,0} psi^)(y) with
/// psi^(y) = psi(1 - y). HALF_PLUS_TO_MINUS: (L_{s,1/2+} psi)(y) against
/// (L_{s,1/2-} psi_bar)(y), psi_bar(y) = psi(1 - y).
inline SidePair transfer_equivalences(Equivalence kind, const FunctionOracle& psi, double s, double y,
                                      const TransferConfig& cfg = {}) {
  const FunctionOracle flipped = reflected(psi);
  switch (kind) {
    case Equivalence::alpha1_to_gauss:
      return {apply_transfer(AlphaParam::one(), s, psi, y, cfg), apply_transfer(AlphaParam::gauss(), s, flipped, y, cfg)};
    case Equivalence::half_plus_to_minus:
      return {apply_transfer(AlphaParam{ContinuedFraction::finite({1, 1})}, s, psi, y, cfg),
              apply_transfer(AlphaParam{ContinuedFraction::finite({2})}, s, flipped, y, cfg)};
  }
  throw std::invalid_argument("unknown equivalence");
}

enum class HurwitzImage { alpha1, half };

/// L_{s,alpha} applied to the constant 1, via Hurwitz zeta
/// zeta(z, a) = sum_{n>=0} (n + a)^{-z}:
///   ALPHA1: sum_{i>=0} (1+i+y)^{-2s} = zeta(2s, 1+y)
///   HALF (1/2-): (1+y)^{-2s} + zeta(2s, 1+2y) - 2^{-2s} zeta(2s, 1+y)
/// The second is the display written with zeta_Hur(a, z) = sum_{n>=1} (n+a)^{-z}.
inline SeriesValue hurwitz_image(HurwitzImage kind, double s, double y) {
  if (!(s > 0.5)) throw DivergenceError("hurwitz_image needs s > 1/2");
  if (!(y > 0 && y <= 1)) throw std::domain_error("hurwitz_image needs y in (0,1]");
  const double z = 2.0 * s;
  switch (kind) {
    case HurwitzImage::alpha1:
      return hurwitz_zeta(z, 1.0 + y);
    case HurwitzImage::half: {
      const auto a = hurwitz_zeta(z, 1.0 + 2.0 * y);
      const auto b = hurwitz_zeta(z, 1.0 + y);
      const double scale = std::pow(2.0, -z);
      return {std::pow(1.0 + y, -z) + a.value - scale * b.value, a.tail_bound + scale * b.tail_bound};
    }
  }
  throw std::invalid_argument("unknown Hurwitz image");
}

// ---------------------------------------------------------- ? pushforward

struct PushforwardValue {
  double value = 0.0;
  double tail_bound = 0.0;
  Dyadic exact_partial;  // the listed branches, exactly
};

namespace detail {

inline Dyadic qmark_of(const Rational& r) { return minkowski_exact(cf_from_rational(r)); }

inline Dyadic abs_diff(const Dyadic& a, const Dyadic& b) { return a < b ? b - a : a - b; }

}  // namespace detail

/// F_Y(y) = sum over branches of the ?-mass of branch([0, y]). Summed exactly
/// for rational y. Chains are cut once the ?-mass of everything they have
/// left, |?(M(I)) - ?(limit)|, is below tail_tol; depths past the last listed
/// one lie in the cylinder [0; n_1..n_K, ...] of ?-measure 2^{-(n_1+...+n_K)}.
inline PushforwardValue qmark_pushforward(const AlphaParam& alpha, const Rational& y, TransferConfig cfg = {}) {
  if (y < 0 || y > 1) throw std::domain_error("qmark_pushforward needs y in [0,1]");
  cfg.s = 1.0;
  const auto fam = BranchCache::global().get(alpha, cfg);
  PushforwardValue out;
  Dyadic sum;
  for (const auto& b : fam->branches)
    sum = sum + detail::abs_diff(detail::qmark_of(mobius_apply(b.map, y)), detail::qmark_of(mobius_apply(b.map, Rational(0))));
  double tail = 0.0;
  for (const auto& chain : fam->chains) {
    const Rational limit(chain.base.a, chain.base.c);
    const Dyadic q_limit = detail::qmark_of(limit);
    std::uint64_t i = chain.first;
    for (;; ++i) {
      if (chain.last && i > *chain.last) break;
      const MobiusMap m{chain.base.a, BigInt(i) * chain.base.a + chain.base.b, chain.base.c,
                        BigInt(i) * chain.base.c + chain.base.d};
      const Dyadic start = detail::qmark_of(mobius_apply(m, Rational(0)));
      const double rest = detail::abs_diff(start, q_limit).to_double();
      if (rest < cfg.tail_tol) {
        tail += rest;
        break;
      }
      sum = sum + detail::abs_diff(detail::qmark_of(mobius_apply(m, y)), start);
    }
  }
  if (!fam->complete) {
    double digit_sum = 0.0;
    for (std::size_t k = 1; k <= fam->depth_reached; ++k) digit_sum += static_cast<double>(alpha.cf.digit(k).value());
    tail += std::ldexp(1.0, -static_cast<int>(std::min(digit_sum, 2000.0)));
  }
  out.exact_partial = sum;
  out.value = sum.to_double();
  out.tail_bound = tail;
  return out;
}

}  // namespace cfmaps
