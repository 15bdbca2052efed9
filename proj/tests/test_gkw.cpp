#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "cfmaps/gkw.hpp"
#include "cfmaps/text.hpp"

using namespace cfmaps;

namespace {

const AlphaParam kGauss = AlphaParam::gauss();

// sum_{m>=1} (y+m)^{-2}, summed directly with an integral tail.
double gauss_one_direct(double y) {
  long double s = 0;
  for (long m = 1000000; m >= 1; --m) s += 1.0L / ((y + m) * (y + m));
  return static_cast<double>(s + 1.0L / (1000000.5L + y));
}

double shape_error(const GridDensity& v, const std::function<double(double)>& exact) {
  const double scale = v.at(0.5) / exact(0.5);
  double worst = 0;
  for (int i = 0; i <= 90; ++i) {
    const double y = 0.1 + 0.01 * i;
    worst = std::max(worst, std::fabs(v.at(y) / scale - exact(y)) / exact(y));
  }
  return worst;
}

}  // namespace

TEST(Gkw, RowSumsAreTheImageOfOne) {
  const std::size_t n = 128;
  const auto m = gkw_matrix(kGauss, 1.0, n);
  for (std::size_t j : {0u, 1u, 17u, 64u, 128u}) {
    double row = 0;
    for (std::size_t c = 0; c <= n; ++c) row += m(j, c);
    const double y = static_cast<double>(j) / n;
    EXPECT_NEAR(row, gauss_one_direct(y), 1e-11) << j;
  }
}

TEST(Gkw, EntriesAreNonnegative) {
  for (const char* a : {"0", "1", "[0;(1)]", "[0;2]", "[0;3,1,2]"}) {
    const auto m = gkw_matrix(AlphaParam{parse_cf(a)}, 1.0, 32);
    for (double x : m.data) EXPECT_GE(x, 0.0);
  }
}

TEST(Gkw, MatchesPointwiseTransferOnPiecewiseLinear) {
  // The matrix row is exactly L applied to the interpolant.
  const std::size_t n = 48;
  GridDensity g{n, {}};
  for (std::size_t j = 0; j <= n; ++j) g.values.push_back(std::cos(3.0 * j / n) + 1.5);
  const auto psi = g.oracle();
  for (const char* a : {"0", "[0;(1)]", "[0;2]", "[0;(1,3)]"}) {
    const AlphaParam alpha{parse_cf(a)};
    const auto m = gkw_matrix(alpha, 1.0, n);
    const auto mv = m.apply(g.values);
    for (std::size_t j = 1; j <= n; j += 7) {
      const auto v = apply_transfer(alpha, 1.0, psi, static_cast<double>(j) / n);
      // Chains: the closed-form Taylor sum of a piecewise-linear function
      // is only as good as its tail estimate.
      EXPECT_NEAR(mv[j], v.value, 1e-9 + v.tail_estimate) << a << " row " << j;
    }
  }
}

TEST(Gkw, AlphaOneReproducesInverse) {
  const std::size_t n = 64;
  const auto m = gkw_matrix(AlphaParam::one(), 1.0, n);
  std::vector<double> v(n + 1);
  for (std::size_t j = 0; j <= n; ++j) v[j] = j == 0 ? 0.0 : static_cast<double>(n) / j;
  const auto mv = m.apply(v);
  // Interpolation error of 1/y grows towards 0; compare on [0.25, 1].
  for (std::size_t j = n / 4; j <= n; ++j) {
    const double y = static_cast<double>(j) / n;
    EXPECT_NEAR(mv[j], 1 / y, 0.02 / y) << y;
  }
}

TEST(Gkw, GaussEigenpair) {
  const auto e = leading_eigen(gkw_matrix(kGauss, 1.0, 256), 1e-13);
  EXPECT_NEAR(e.lambda, 1.0, 1e-5);
  for (std::size_t j = 0; j <= 256; j += 16) {
    const double y = j / 256.0;
    EXPECT_NEAR(e.vector.values[j], 1 / (std::log(2.0) * (1 + y)), 2e-4);
  }
}

TEST(Gkw, GaussEigenvalueConvergesLikeOneOverN) {
  double prev = 1.0;
  for (std::size_t n : {32u, 64u, 128u, 256u}) {
    const double err = std::fabs(leading_eigen(gkw_matrix(kGauss, 1.0, n), 1e-14).lambda - 1.0);
    EXPECT_LT(err, prev);
    EXPECT_LT(err * n, 0.01);
    prev = err;
  }
}

TEST(Gkw, RefinementDrift) {
  const double l16 = leading_eigen(gkw_matrix(kGauss, 1.0, 16), 1e-14).lambda;
  const double l256 = leading_eigen(gkw_matrix(kGauss, 1.0, 256), 1e-14).lambda;
  EXPECT_LT(std::fabs(l16 - l256), 1e-3);
}

TEST(Gkw, InfiniteMeasureShapes) {
  // Mass piles up at 0, so only the shape on [0.1, 1] is compared, and it
  // improves with the grid.
  const std::function<double(double)> inv = [](double y) { return 1 / y; };
  const std::function<double(double)> fib = [](double y) { return 1 / (y * (y + 1)); };
  for (const auto& [alpha, exact] : {std::pair{AlphaParam::one(), inv}, std::pair{AlphaParam::fibonacci(), fib}}) {
    const double coarse = shape_error(leading_eigen(gkw_matrix(alpha, 1.0, 64), 1e-12, 100000).vector, exact);
    const double fine = shape_error(leading_eigen(gkw_matrix(alpha, 1.0, 256), 1e-12, 100000).vector, exact);
    EXPECT_LT(fine, 0.05);
    EXPECT_LT(fine, coarse);
  }
}

TEST(Gkw, EigenvectorIsNonnegativeAndNormalized) {
  const auto e = leading_eigen(gkw_matrix(AlphaParam{parse_cf("[0;(2)]")}, 1.0, 64), 1e-12, 100000);
  for (double x : e.vector.values) EXPECT_GE(x, 0.0);
  EXPECT_NEAR(e.vector.l1(), 1.0, 1e-12);
}

TEST(LeadingEigen, Identity) {
  const auto e = leading_eigen(DenseMatrix::identity(17), 1e-14);
  EXPECT_DOUBLE_EQ(e.lambda, 1.0);
  for (double x : e.vector.values) EXPECT_DOUBLE_EQ(x, 1.0);
}

TEST(LeadingEigen, ReportsNonConvergence) {
  // A rotation has no dominant eigenvalue; the normalized iterate cycles.
  DenseMatrix m(3, 3);
  m(0, 1) = 1;
  m(1, 2) = 2;
  m(2, 0) = 1;
  try {
    leading_eigen(m, 1e-14, 50);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.last_iterate().size(), 3u);
    EXPECT_TRUE(std::isfinite(e.last_eigenvalue()));
  }
}

TEST(LeadingEigen, RejectsNegativeEntries) {
  DenseMatrix m = DenseMatrix::identity(4);
  m(0, 1) = -1;
  EXPECT_THROW(leading_eigen(m), std::invalid_argument);
}

TEST(Gkw, RejectsSmallGrid) { EXPECT_THROW(gkw_matrix(kGauss, 1.0, 8), std::invalid_argument); }

TEST(Gkw, ParallelAssemblyMatchesSerial) {
  const AlphaParam alpha{parse_cf("[0;(1,2)]")};
  const auto a = gkw_matrix(alpha, 1.0, 40, {}, 1);
  const auto b = gkw_matrix(alpha, 1.0, 40, {}, 4);
  EXPECT_EQ(a.data, b.data);
}

TEST(GridDensity, CsvRoundTrip) {
  GridDensity g{16, {}};
  for (int j = 0; j <= 16; ++j) g.values.push_back(1.0 / (3.0 + j));
  std::ostringstream os;
  write_csv(os, g);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "y,value");
  for (int j = 0; j <= 16; ++j) {
    std::getline(is, line);
    const auto comma = line.find(',');
    EXPECT_EQ(std::stod(line.substr(comma + 1)), g.values[j]);
  }
}
