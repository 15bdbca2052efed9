#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cfmaps/lyapunov.hpp"
#include "cfmaps/text.hpp"

using namespace cfmaps;

namespace {

const double kPhi = std::numbers::phi;
const double kGaussConstant = std::numbers::pi * std::numbers::pi / (6 * std::log(2.0));

// Period-1 point [0;(k)] = (sqrt(k^2+4) - k)/2; the Gauss map there has |T'| = x^{-2}.
double period_one_point(int k) { return (std::sqrt(k * k + 4.0) - k) / 2; }

double binet_fib(int n) { return (std::pow(kPhi, n) - std::pow(-1 / kPhi, n)) / std::sqrt(5.0); }

double binet_pell(int n) {
  const double r = std::numbers::sqrt2;
  return (std::pow(1 + r, n) - std::pow(1 - r, n)) / (2 * r);
}

}  // namespace

TEST(LyapunovOrbit, GaussPeriodOnePoints) {
  for (int k = 1; k <= 3; ++k) {
    const auto x = ContinuedFraction::periodic({}, {static_cast<ContinuedFraction::value_type>(k)});
    const double oracle = -2 * std::log(period_one_point(k));
    for (std::size_t n : {1u, 7u, 40u}) {
      const auto a = lyapunov_orbit(AlphaParam::gauss(), x, n);
      EXPECT_NEAR(a.value, oracle, 1e-12) << k;
      EXPECT_EQ(a.steps, n);
      EXPECT_FALSE(a.hit_zero);
    }
    EXPECT_NEAR(oracle, 2 * std::log((k + std::sqrt(k * k + 4.0)) / 2), 1e-14);
  }
}

TEST(LyapunovOrbit, GoldenMeanUnderGauss) {
  EXPECT_NEAR(lyapunov_orbit(AlphaParam::gauss(), parse_cf("[0;(1)]"), 25).value, 2 * std::log(kPhi), 1e-12);
}

TEST(LyapunovOrbit, FibonacciFixedPointIsConstantInN) {
  // x_1 = [0;1,(2)] = 1/sqrt 2 sits on the branch x = (y+1)/(2y+1).
  const double y = 1 / std::numbers::sqrt2;
  auto branch = [](double t) { return (t + 1) / (2 * t + 1); };
  ASSERT_NEAR(branch(y), y, 1e-15);
  const double h = 1e-5;
  const double slope = (branch(y + h) - branch(y - h)) / (2 * h);
  const double oracle = -std::log(std::fabs(slope));
  const auto x1 = fibonacci_fixed_point(1);
  for (std::size_t n : {1u, 2u, 9u, 30u}) {
    EXPECT_NEAR(lyapunov_orbit(AlphaParam::fibonacci(), x1, n).value, oracle, 1e-9) << n;
  }
}

TEST(LyapunovOrbit, RationalOrbitStopsAtZero) {
  // 2/7 = [0;3,2]: x_0 x_1 = 1/7, so the two-step average is log 7.
  const auto a = lyapunov_orbit(AlphaParam::gauss(), parse_cf("[0;3,2]"), 10);
  EXPECT_TRUE(a.hit_zero);
  EXPECT_EQ(a.steps, 2u);
  EXPECT_NEAR(a.value, std::log(7.0), 1e-14);
  EXPECT_THROW(lyapunov_orbit(AlphaParam::gauss(), ContinuedFraction::zero(), 3), UndefinedDerivative);
}

TEST(LyapunovOrbit, DigitCursorMatchesExactOrbit) {
  const auto x = ContinuedFraction::finite({2, 5, 1, 1, 3, 7, 1, 2, 4, 1, 6});
  for (const auto& alpha : {AlphaParam::gauss(), AlphaParam::fibonacci(), AlphaParam{parse_cf("[0;2,(1,3)]")}}) {
    for (std::size_t n : {1u, 4u, 50u}) {
      const auto a = lyapunov_orbit(alpha, x, n);
      const auto rec = orbit(alpha, x, n);
      EXPECT_EQ(a.steps, rec.log_deriv_terms);
      EXPECT_EQ(a.hit_zero, rec.log_deriv_terms < n);
      EXPECT_NEAR(a.value, rec.log_deriv_sum / rec.log_deriv_terms, 1e-12);
    }
  }
}

TEST(LyapunovQn, FibonacciGrowth) {
  const double v = lyapunov_qn(parse_cf("[0;(1)]"), 30);
  EXPECT_NEAR(v, 2 * std::log(binet_fib(31)) / 30, 1e-14);
  EXPECT_NEAR(v, 2 * std::log(kPhi), 2 * std::log(std::sqrt(5.0)) / 30 + 1e-12);
}

TEST(LyapunovQn, PellGrowth) {
  const double v = lyapunov_qn(parse_cf("[0;(2)]"), 30);
  EXPECT_NEAR(v, 2 * std::log(binet_pell(31)) / 30, 1e-14);
  EXPECT_NEAR(v, 2 * std::log(1 + std::numbers::sqrt2), 0.05);
}

TEST(LyapunovQn, ApproachesOrbitAverageForPeriodicPoints) {
  for (const char* s : {"[0;(1)]", "[0;(2)]", "[0;(1,3)]", "[0;4,(2,1,5)]"}) {
    const auto x = parse_cf(s);
    double prev = INFINITY;
    for (std::size_t n : {10u, 100u, 1000u}) {
      const double gap = std::fabs(lyapunov_qn(x, n) - lyapunov_orbit(AlphaParam::gauss(), x, n).value);
      EXPECT_LT(gap, prev) << s << " " << n;
      EXPECT_LT(gap, 4.0 / n) << s << " " << n;
      prev = gap;
    }
  }
}

TEST(LyapunovQn, NeedsEnoughDigits) {
  EXPECT_THROW(lyapunov_qn(parse_cf("[0;3,2]"), 3), TruncationExhausted);
  EXPECT_THROW(lyapunov_qn(ContinuedFraction::truncated({1, 2, 3}), 4), TruncationExhausted);
  EXPECT_NO_THROW(lyapunov_qn(ContinuedFraction::truncated({1, 2, 3}), 3));
}

TEST(MonteCarlo, GaussConstant) {
  const auto e = monte_carlo_lyapunov(AlphaParam::gauss(), 50, 2000, 8000, 1);
  EXPECT_NEAR(e.value, kGaussConstant, 3 * e.std_error);
  EXPECT_GT(e.std_error, 0.0);
  EXPECT_EQ(e.n_samples, 50u);
  EXPECT_EQ(e.n_steps, 2000u);
}

TEST(MonteCarlo, EstimatorsAgreeUnderGauss) {
  const auto d = monte_carlo_lyapunov(AlphaParam::gauss(), 40, 1000, 4000, 7);
  const auto q = monte_carlo_lyapunov(AlphaParam::gauss(), 40, 1000, 4000, 7, {LyapunovMethod::qn_growth});
  EXPECT_EQ(q.method, LyapunovMethod::qn_growth);
  EXPECT_LE(std::fabs(d.value - q.value), 3 * std::hypot(d.std_error, q.std_error));
}

TEST(MonteCarlo, SeedDeterminism) {
  const AlphaParam alpha{parse_cf("[0;(1,2)]")};
  const auto a = monte_carlo_lyapunov(alpha, 12, 300, 1200, 99, {.threads = 1});
  const auto b = monte_carlo_lyapunov(alpha, 12, 300, 1200, 99, {.threads = 5});
  const auto c = monte_carlo_lyapunov(alpha, 12, 300, 1200, 100);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_NE(a.value, c.value);
}

TEST(MonteCarlo, SingleSampleSingleStep) {
  const auto digits = detail::dyadic_sample_digits(5, 0, 0, 64);
  const auto x = ContinuedFraction::finite(digits);
  for (const auto& alpha : {AlphaParam::gauss(), AlphaParam::fibonacci(), AlphaParam::one()}) {
    const auto e = monte_carlo_lyapunov(alpha, 1, 1, 64, 5);
    EXPECT_NEAR(e.value, deriv_at(alpha, x), 1e-12);
    EXPECT_EQ(e.std_error, 0.0);
  }
}

TEST(MonteCarlo, PrecisionBudget) {
  EXPECT_THROW(monte_carlo_lyapunov(AlphaParam::gauss(), 4, 100, 399, 1), PrecisionBudgetError);
  EXPECT_NO_THROW(monte_carlo_lyapunov(AlphaParam::gauss(), 4, 100, 400, 1));
}

TEST(MonteCarlo, EarlyTerminationsAreRedrawn) {
  // 4-bit samples are 0 one time in 16; zero has no orbit and is redrawn.
  const auto e = monte_carlo_lyapunov(AlphaParam::gauss(), 200, 1, 4, 3);
  EXPECT_GT(e.discarded_samples, 0u);
  EXPECT_TRUE(std::isfinite(e.value));
}

TEST(MonteCarlo, SamplesAreUniformDyadics) {
  double sum = 0;
  const int n = 2000;
  for (int i = 0; i < n; ++i) {
    const auto d = detail::dyadic_sample_digits(11, i, 0, 64);
    sum += cf_value(ContinuedFraction::finite(d), 64).value;
  }
  EXPECT_NEAR(sum / n, 0.5, 4 * std::sqrt(1.0 / 12 / n));
}

TEST(MonteCarlo, FibonacciAverageKeepsFalling) {
  // The neutral fixed point at 0 holds Lebesgue-typical orbits for ever longer
  // stretches; the finite-n average decays instead of settling.
  const auto short_run = monte_carlo_lyapunov(AlphaParam::fibonacci(), 50, 500, 2000, 1);
  const auto long_run = monte_carlo_lyapunov(AlphaParam::fibonacci(), 50, 4000, 16000, 1);
  EXPECT_LT(long_run.value, short_run.value);
  EXPECT_LT(long_run.value, 0.5 * 2 * std::log(kPhi));
}

TEST(MonteCarlo, GaussAtJimmImagesTendsToGoldenValue) {
  // J x is mostly ones; the share of other digits decays like 1/log n, so the
  // average approaches 2 log Phi from above, slowly.
  const double target = 2 * std::log(kPhi);
  double prev = INFINITY;
  for (std::size_t n : {250u, 1000u, 4000u}) {
    const auto e = monte_carlo_lyapunov(AlphaParam::gauss(), 40, n, 4 * n, 2, {.jimm_image = true});
    EXPECT_GT(e.value, target);
    EXPECT_LT(e.value, prev);
    EXPECT_LT(e.value, target + 0.15);
    prev = e.value;
  }
}

TEST(JimmPrefix, MatchesFullTransducer) {
  const std::vector<std::uint64_t> digits{3, 1, 1, 4, 2, 1, 5, 9, 2, 6};
  detail::JimmTransducer t;
  for (auto d : digits) t.feed(d);
  for (std::size_t len = 1; len <= t.out.size(); ++len) {
    const auto p = detail::jimm_prefix(digits, len);
    ASSERT_EQ(p.size(), len);
    EXPECT_TRUE(std::equal(p.begin(), p.end(), t.out.begin())) << len;
  }
  // A digit too large for the transducer still gives its leading ones.
  const auto big = detail::jimm_prefix({3, std::uint64_t{1} << 40}, 50);
  EXPECT_EQ(big.size(), 50u);
  EXPECT_EQ(big[0], 1u);
  EXPECT_EQ(big[1], 1u);
  EXPECT_EQ(big[2], 2u);
  EXPECT_EQ(big[3], 1u);
}
