#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cfmaps/gkw.hpp"
#include "cfmaps/jimm.hpp"
#include "cfmaps/minkowski.hpp"
#include "cfmaps/residuals.hpp"
#include "cfmaps/text.hpp"
#include "cfmaps/transfer.hpp"
#include "cfmaps/zeta.hpp"

// Invariant suites behind `cfmaps verify`. Each check records its residual and
// the bound it was held to.

namespace cfmaps {

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct SuiteReport {
  std::string suite;
  double tol = 0.0;
  std::vector<CheckResult> checks;

  void add(std::string name, double residual, double bound) {
    checks.push_back({std::move(name), residual, bound, std::fabs(residual) <= bound});
  }
  void add_exact(std::string name, bool ok) { checks.push_back({std::move(name), ok ? 0.0 : 1.0, 0.0, ok}); }

  std::size_t failures() const {
    return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const auto& c) { return !c.pass; }));
  }
  bool passed() const { return failures() == 0; }
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"densities", "equations", "conjugacy", "qmark", "zeta"};
  return names;
}

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// 20 points spread over [0.05, 0.95].
inline std::vector<double> interior_points() {
  std::vector<double> ys;
  for (int j = 0; j < 20; ++j) ys.push_back(0.05 + 0.9 * j / 19.0);
  return ys;
}

struct DensityCase {
  std::string label;
  AlphaParam alpha;
  FunctionOracle psi;
};

inline std::vector<DensityCase> density_cases() {
  return {{"gauss", AlphaParam::gauss(), closed_form_density(Density::gauss)},
          {"alpha=1", AlphaParam::one(), closed_form_density(Density::alpha_one)},
          {"fibonacci", AlphaParam::fibonacci(), closed_form_density(Density::fibonacci)},
          {"[0;(2)]", AlphaParam{ContinuedFraction::periodic({}, {2})}, closed_form_density(Density::k_series, 2)},
          {"[0;(3)]", AlphaParam{ContinuedFraction::periodic({}, {3})}, closed_form_density(Density::k_series, 3)}};
}

}  // namespace detail

/// |L_{1,alpha} psi - psi| at 20 points for the closed-form invariant densities.
inline SuiteReport verify_densities(double tol = 1e-8) {
  SuiteReport r{"densities", tol, {}};
  for (const auto& c : detail::density_cases()) {
    for (double y : detail::interior_points()) {
      const auto v = apply_transfer(c.alpha, 1.0, c.psi, y);
      r.add(c.label + " y=" + detail::fmt(y), v.value - c.psi(y), tol + v.tail_estimate);
    }
  }
  return r;
}

inline SuiteReport verify_equations(double tol = 1e-12) {
  SuiteReport r{"equations", tol, {}};
  const auto wave = [](double y) { return std::sin(2 * std::numbers::pi * y); };
  for (int i = 1; i <= 10; ++i) {
    const double y = 0.1 * i;
    r.add("master sin(2 pi y) y=" + detail::fmt(y), residual_master(wave, 1.0, 1.0, y), tol);
  }
  for (const auto& c : detail::density_cases()) {
    for (double y : detail::interior_points())
      r.add("master " + c.label + " y=" + detail::fmt(y), residual_master(c.psi, 1.0, 1.0, y), tol);
  }
  const auto gauss = closed_form_density(Density::gauss);
  for (double y : detail::interior_points())
    r.add("B_1 gauss y=" + detail::fmt(y), residual_b(gauss, 1.0, 1.0, y), tol);

  const auto inv = [](const Rational& y) -> Rational { return 1 / y; };
  const auto fib = [](const Rational& y) -> Rational { return 1 / (y * (y + 1)); };
  for (int i = 1; i <= 10; ++i) {
    const Rational y(i, 7);
    const std::string at = " y=" + std::to_string(i) + "/7";
    r.add_exact("kernel eta 1/y" + at, residual_kernel_eta(inv, 1.0, y) == 0);
    r.add_exact("lewis 1/y" + at, residual_lewis(inv, 1.0, y) == 0);
    r.add_exact("fibonacci three-term" + at, residual_fib_threeterm(fib, 1.0, Rational(1), y) == 0);
  }

  // The 1/2- fixed function from the discretized operator, continued past 1 by
  // the operator itself; held to ten times its own discretization defect.
  const AlphaParam half{ContinuedFraction::finite({2})};
  const std::size_t n = 256;
  const auto e = leading_eigen(gkw_matrix(half, 1.0, n), 1e-13, 100000);
  const auto psi_h = e.vector.oracle();
  const double lambda = e.lambda;
  double defect = 0.0;
  for (std::size_t j = n / 20; j < n; ++j) {
    const double y = (static_cast<double>(j) + 0.5) / static_cast<double>(n);
    defect = std::max(defect, std::fabs(apply_transfer(half, 1.0, psi_h, y).value / lambda - psi_h(y)));
  }
  const FunctionOracle psi{[&](double z) { return z <= 1 ? psi_h(z) : apply_transfer(half, 1.0, psi_h, z).value / lambda; },
                           0.0, 3.0, false, true};
  for (int i = 0; i < 20; ++i) {
    const double y = 0.1123 + 0.045 * i;
    r.add("k-minus K=2 discretized y=" + detail::fmt(y), residual_k_minus(psi, 1.0, 2, y), 10 * defect);
  }
  return r;
}

/// J(J(x)) = x and J(T_0(J(x))) = T_{Phi*}(x) for random finite x.
inline SuiteReport verify_conjugacy(std::size_t count = 500, std::size_t depth = 30, std::uint64_t seed = 1) {
  SuiteReport r{"conjugacy", 0.0, {}};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> digit(1, 5);
  const AlphaParam gauss = AlphaParam::gauss(), fib = AlphaParam::fibonacci();
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<std::uint64_t> d(depth);
    for (auto& v : d) v = digit(rng);
    if (d.back() == 1) d.back() = 2;
    const auto x = ContinuedFraction::finite(d);
    const std::string label = format_cf(x);
    r.add_exact("J(J(x)) = x " + label, jimm(jimm(x)) == x);
    const auto lhs = jimm(t_alpha_step(gauss, jimm(x)));
    const auto rhs = t_alpha_step(fib, x);
    r.add_exact("J T_0 J = T_Phi* " + label, compare_settled(lhs, rhs, 4 * depth).agree);
  }
  return r;
}

inline SuiteReport verify_qmark(double tol = 1e-15, std::uint64_t seed = 2) {
  SuiteReport r{"qmark", tol, {}};
  const std::pair<Rational, Rational> known[] = {{Rational(1, 2), Rational(1, 2)},
                                                 {Rational(1, 3), Rational(1, 4)},
                                                 {Rational(2, 5), Rational(3, 8)}};
  for (const auto& [x, q] : known)
    r.add_exact("?(" + x.str() + ") = " + q.str(), minkowski_exact(cf_from_rational(x)).to_rational() == q);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> den(2, 1000);
  std::set<Rational> pool;
  while (pool.size() < 200) {
    const long q = den(rng);
    pool.insert(Rational(std::uniform_int_distribution<long>(1, q - 1)(rng), q));
  }
  const std::vector<Rational> xs(pool.begin(), pool.end());
  std::size_t order_breaks = 0, symmetry_breaks = 0;
  Dyadic prev = minkowski_exact(ContinuedFraction::zero());
  for (const auto& x : xs) {
    const Dyadic q = minkowski_exact(cf_from_rational(x));
    order_breaks += !(prev < q);
    symmetry_breaks += (q + minkowski_exact(cf_from_rational(Rational(1) - x))).to_rational() != 1;
    prev = q;
  }
  r.add_exact("? increasing on 200 sorted rationals", order_breaks == 0);
  r.add_exact("?(x) + ?(1-x) = 1 on 200 rationals", symmetry_breaks == 0);

  const std::pair<std::string, AlphaParam> alphas[] = {{"0", AlphaParam::gauss()},
                                                       {"Phi*", AlphaParam::fibonacci()},
                                                       {"1/2-", AlphaParam{ContinuedFraction::finite({2})}}};
  const Rational ys[] = {Rational(1, 2), Rational(1, 3), Rational(2, 5), Rational(3, 7), Rational(5, 8),
                         Rational(1, 10), Rational(7, 9), Rational(11, 13), Rational(1), Rational(4, 17)};
  for (const auto& [label, alpha] : alphas) {
    for (const auto& y : ys) {
      const auto f = qmark_pushforward(alpha, y);
      const double target = minkowski_exact(cf_from_rational(y)).to_double();
      r.add("pushforward alpha=" + label + " y=" + y.str(), f.value - target, f.tail_bound + tol);
    }
  }
  return r;
}

inline SuiteReport verify_zeta(double tol = 1e-9) {
  SuiteReport r{"zeta", tol, {}};
  for (double z : {1.5, 2.0, 3.0}) {
    for (double a : {0.1, 0.5, 1.0, 2.5}) {
      const auto lo = hurwitz_zeta(z, a), hi = hurwitz_zeta(z, a + 1);
      const double term = std::pow(a, -z);
      r.add("hurwitz shift z=" + detail::fmt(z) + " a=" + detail::fmt(a), lo.value - hi.value - term,
            lo.tail_bound + hi.tail_bound + 4e-16 * (lo.value + term));
    }
  }
  const double coarse = fib_zeta(1, 60).value, fine = fib_zeta(1, 120).value;
  r.add("fib_zeta(1) under doubling", coarse - fine, tol);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      for (int k = 0; k < 5; ++k) {
        const double s = 1 + 0.5 * i, t = 0.5 * j, x = 0.5 + 0.375 * k;
        const auto res = fib_functional_eq_residual(s, t, x);
        r.add("fibonacci functional equation s=" + detail::fmt(s) + " t=" + detail::fmt(t) + " x=" + detail::fmt(x),
              res.value, res.tail_bound);
      }
    }
  }
  const AlphaParam half{ContinuedFraction::finite({2})};
  for (double s : {1.0, 1.5}) {
    for (double y : {0.1, 0.25, 0.5, 0.75, 1.0}) {
      const auto one = constant_function(1.0);
      r.add("alpha=1 Hurwitz image s=" + detail::fmt(s) + " y=" + detail::fmt(y),
            hurwitz_image(HurwitzImage::alpha1, s, y).value - apply_transfer(AlphaParam::one(), s, one, y).value, tol);
      r.add("1/2- Hurwitz image s=" + detail::fmt(s) + " y=" + detail::fmt(y),
            hurwitz_image(HurwitzImage::half, s, y).value - apply_transfer(half, s, one, y).value, tol);
    }
  }
  return r;
}

/// Runs a suite by name with an optional tolerance override.
inline SuiteReport run_suite(const std::string& name, std::optional<double> tol = std::nullopt) {
  if (name == "densities") return tol ? verify_densities(*tol) : verify_densities();
  if (name == "equations") return tol ? verify_equations(*tol) : verify_equations();
  if (name == "conjugacy") return verify_conjugacy();
  if (name == "qmark") return tol ? verify_qmark(*tol) : verify_qmark();
  if (name == "zeta") return tol ? verify_zeta(*tol) : verify_zeta();
  throw std::invalid_argument("unknown suite '" + name + "'");
}

}  // namespace cfmaps
