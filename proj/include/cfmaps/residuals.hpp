#pragma once

#include <cmath>
#include <stdexcept>

#include "cfmaps/bigint.hpp"

// Residuals (LHS - RHS) of the functional equations satisfied by eigenfunctions
// of the transfer operators. Each works for double, or for Rational when 2s is
// an integer; psi is any callable T -> T.

namespace cfmaps {

namespace detail {

inline double neg_power(double base, double s) { return std::pow(base, -2.0 * s); }

inline Rational neg_power(const Rational& base, double s) {
  const double two_s = 2.0 * s;
  if (two_s != std::floor(two_s) || two_s < 0) throw std::domain_error("exact residuals need 2s to be a nonnegative integer");
  Rational p = 1;
  for (long i = 0; i < static_cast<long>(two_s); ++i) p *= base;
  return 1 / p;
}

template <class T>
void require_positive(const T& y) {
  if (!(y > 0)) throw std::domain_error("residuals need y > 0");
}

}  // namespace detail

/// psi(y) - psi(1+y) + y^{-2s}[psi(1/y) - psi(1+1/y)]
///   - (1/lambda)(1+y)^{-2s}[psi(y/(1+y)) + psi(1/(1+y))]
template <class T, class F>
T residual_master(const F& psi, double s, const T& lambda, const T& y) {
  detail::require_positive(y);
  if (lambda == 0) throw std::domain_error("lambda must be nonzero");
  const T one = 1;
  const T inv = one / y;
  return psi(y) - psi(one + y) + detail::neg_power(y, s) * (psi(inv) - psi(one + inv)) -
         detail::neg_power(T(one + y), s) * (psi(T(y / (one + y))) + psi(T(one / (one + y)))) / lambda;
}

/// Lewis three-term equation: psi(y) - psi(1+y) - (1+y)^{-2s} psi(y/(1+y)).
template <class T, class F>
T residual_lewis(const F& psi, double s, const T& y) {
  detail::require_positive(y);
  const T one = 1;
  return psi(y) - psi(T(one + y)) - detail::neg_power(T(one + y), s) * psi(T(y / (one + y)));
}

/// psi(y) - psi(1+y) - (1/lambda)(1+y)^{-2s} psi(1/(1+y)). For lambda = 1 this
/// is Mayer's functional equation (the Gauss density solves it at s = 1).
template <class T, class F>
T residual_b(const F& psi, double s, const T& lambda, const T& y) {
  detail::require_positive(y);
  if (lambda == 0) throw std::domain_error("lambda must be nonzero");
  const T one = 1;
  return psi(y) - psi(T(one + y)) - detail::neg_power(T(one + y), s) * psi(T(one / (one + y))) / lambda;
}

/// psi(y) - y^{-2s} psi((y+1)/y) - (1/lambda)(y+1)^{-2s} psi(y/(y+1))
template <class T, class F>
T residual_fib_threeterm(const F& psi, double s, const T& lambda, const T& y) {
  detail::require_positive(y);
  if (lambda == 0) throw std::domain_error("lambda must be nonzero");
  const T one = 1;
  return psi(y) - detail::neg_power(y, s) * psi(T((y + one) / y)) -
         detail::neg_power(T(y + one), s) * psi(T(y / (y + one))) / lambda;
}

/// psi(y+1) - [psi(y) - (1+y)^{-2s} psi(1/(1+y)) + (K+y)^{-2s} psi(1/(K+y))
///             - (Ky+1)^{-2s} psi(y/(Ky+1))]
template <class T, class F>
T residual_k_minus(const F& psi, double s, unsigned K, const T& y) {
  if (K < 2) throw std::domain_error("residual_k_minus needs K >= 2");
  detail::require_positive(y);
  const T one = 1, k = T(K);
  const T rhs = psi(y) - detail::neg_power(T(one + y), s) * psi(T(one / (one + y))) +
                detail::neg_power(T(k + y), s) * psi(T(one / (k + y))) -
                detail::neg_power(T(k * y + one), s) * psi(T(y / (k * y + one)));
  return psi(T(y + one)) - rhs;
}

/// y^{-2s} eta(1/y) - eta(y+1) - y^{-2s} eta(1+1/y)
template <class T, class F>
T residual_kernel_eta(const F& eta, double s, const T& y) {
  detail::require_positive(y);
  const T one = 1;
  const T inv = one / y;
  const T w = detail::neg_power(y, s);
  return w * eta(inv) - eta(T(y + one)) - w * eta(T(one + inv));
}

/// phi(y) + y^{-2s} phi(1/y): zero when phi is killed by I + U.
template <class T, class F>
T residual_cocycle(const F& phi, double s, const T& y) {
  detail::require_positive(y);
  const T one = 1;
  return phi(y) + detail::neg_power(y, s) * phi(T(one / y));
}

}  // namespace cfmaps
