#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

#include "cfmaps/errors.hpp"

namespace cfmaps {

struct SeriesValue {
  double value = 0.0;
  double tail_bound = 0.0;
};

/// zeta(z, a) = sum_{n>=0} (n + a)^{-z}, z > 1, a > 0.
///
/// Direct sum of `n_terms` terms, then the Euler-Maclaurin tail
///   (N+a)^{1-z}/(z-1) + (N+a)^{-z}/2 + sum_j B_2j/(2j)! z(z+1)..(z+2j-2) (N+a)^{-z-2j+1}
/// with three Bernoulli corrections. The reported bound is the size of the
/// first omitted correction, doubled.
inline SeriesValue hurwitz_zeta(double z, double a, std::size_t n_terms = 16) {
  if (!(z > 1.0)) throw DivergenceError("hurwitz_zeta needs z > 1");
  if (!(a > 0.0)) throw std::domain_error("hurwitz_zeta needs a > 0");
  double sum = 0.0;
  for (std::size_t n = 0; n < n_terms; ++n) sum += std::pow(static_cast<double>(n) + a, -z);
  const double x = static_cast<double>(n_terms) + a;
  double tail = std::pow(x, 1.0 - z) / (z - 1.0) + 0.5 * std::pow(x, -z);
  // B2/2! = 1/12, B4/4! = -1/720, B6/6! = 1/30240, B8/8! = -1/1209600
  static constexpr double kCoef[] = {1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0};
  double rising = z;            // z (z+1) ... (z+2j-2)
  double power = std::pow(x, -z - 1.0);
  for (int j = 0; j < 3; ++j) {
    tail += kCoef[j] * rising * power;
    rising *= (z + 2.0 * j + 1.0) * (z + 2.0 * j + 2.0);
    power /= x * x;
  }
  const double next = std::fabs(kCoef[3] * rising * power);
  return {sum + tail, 2.0 * next + 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(sum + tail)};
}

}  // namespace cfmaps
