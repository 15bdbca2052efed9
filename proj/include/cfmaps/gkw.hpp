#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "cfmaps/errors.hpp"
#include "cfmaps/transfer.hpp"

namespace cfmaps {

struct DenseMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::vector<double> apply(const std::vector<double>& v) const {
    std::vector<double> out(rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
      const double* row = &data[i * cols];
      double s = 0.0;
      for (std::size_t j = 0; j < cols; ++j) s += row[j] * v[j];
      out[i] = s;
    }
    return out;
  }
};

inline void write_csv(std::ostream& os, const DenseMatrix& m) {
  char buf[32];
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      if (j) os << ',';
      os << buf;
    }
    os << '\n';
  }
}

/// Samples of a function at y_j = j/n, j = 0..n, read back by linear
/// interpolation.
struct GridDensity {
  std::size_t n = 0;
  std::vector<double> values;

  double at(double y) const {
    if (!(y >= 0.0 && y <= 1.0)) throw std::domain_error("grid density evaluated outside [0,1]");
    const double t = y * static_cast<double>(n);
    const auto j = std::min(static_cast<std::size_t>(t), n - 1);
    const double f = t - static_cast<double>(j);
    return (1.0 - f) * values[j] + f * values[j + 1];
  }

  /// Trapezoid rule on the grid.
  double l1() const { return trapezoid_l1(values); }

  static double trapezoid_l1(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += std::fabs(x);
    s -= 0.5 * (std::fabs(v.front()) + std::fabs(v.back()));
    return s / static_cast<double>(v.size() - 1);
  }

  FunctionOracle oracle() const {
    GridDensity copy = *this;
    return {[copy](double y) { return copy.at(y); }, 0.0, 1.0, true, true};
  }
};

inline void write_csv(std::ostream& os, const GridDensity& d) {
  char buf[64];
  os << "y,value\n";
  for (std::size_t j = 0; j <= d.n; ++j) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g", static_cast<double>(j) / static_cast<double>(d.n), d.values[j]);
    os << buf << '\n';
  }
}

namespace detail {

/// One row of the collocation matrix: (L psi)(y) as a combination of the node
/// values of the piecewise-linear interpolant of psi.
class RowAssembler {
 public:
  RowAssembler(double* row, std::size_t n, double y, double two_s) : row_(row), n_(n), nd_(static_cast<double>(n)), y_(y), two_s_(two_s) {}

  std::size_t cell(double img) const {
    return std::min(static_cast<std::size_t>(std::max(img, 0.0) * nd_), n_ - 1);
  }

  void deposit(double img, double w) {
    const std::size_t c = cell(img);
    const double t = std::clamp(img * nd_ - static_cast<double>(c), 0.0, 1.0);
    row_[c] += w * (1.0 - t);
    row_[c + 1] += w * t;
  }

  void branch(const BranchFamily::Fast& m) {
    const double den = m.c * y_ + m.d;
    deposit((m.a * y_ + m.b) / den, std::pow(den, -two_s_));
  }

  /// A chain walks monotonically towards its limit, so whole runs of it land
  /// in one cell. Long runs go in closed form: with t = (image - a)/h,
  /// sum w t = W0 (L - a)/h + W1/h.
  void chain(const BranchChain& chain) {
    const ChainGeometry g = geometry(chain);
    const double h = 1.0 / nd_;
    const auto last = chain.last.value_or(kNoEnd);
    auto image = [&](std::uint64_t i) { return g.image(static_cast<double>(i) + y_); };
    auto weight = [&](std::uint64_t i) { return std::pow(g.q * (static_cast<double>(i) + y_) + g.q_prev, -two_s_); };
    std::uint64_t i = chain.first;
    while (i <= last) {
      const double img = image(i);
      const std::size_t c = cell(img);
      const double a = static_cast<double>(c) * h;
      // Last index whose image stays in cell c.
      std::uint64_t j = last;
      const double edge = g.sigma > 0 ? a : a + h;
      const bool limit_inside = g.sigma > 0 ? g.limit >= edge : g.limit <= edge;
      if (!limit_inside) {
        // |image_i - L| = 1/(q (q (i+y) + q')) reaches |edge - L| at i*.
        const double istar = (1.0 / (g.q * std::fabs(edge - g.limit)) - g.q_prev) / g.q - y_;
        j = istar < static_cast<double>(i) ? i : (istar > 1e18 ? last : static_cast<std::uint64_t>(istar));
        j = std::min(j, last);
        while (j < last && cell(image(j + 1)) == c) ++j;
        while (j > i && cell(image(j)) != c) --j;
      }
      if (j - i < 64) {
        for (std::uint64_t k = i; k <= j; ++k) deposit(image(k), weight(k));
      } else {
        const double w0 = chain_power_sum(g.q, g.q_prev, y_, two_s_, i, j).value;
        const double w1 = g.sigma / g.q * chain_power_sum(g.q, g.q_prev, y_, two_s_ + 1.0, i, j).value;
        const double right = std::clamp((w0 * (g.limit - a) + w1) / h, 0.0, w0);
        row_[c] += w0 - right;
        row_[c + 1] += right;
      }
      if (j == last) break;
      i = j + 1;
    }
  }

 private:
  double* row_;
  std::size_t n_;
  double nd_, y_, two_s_;
};

}  // namespace detail

/// Collocation matrix of L_{s,alpha} on the grid y_j = j/n: row j holds the
/// node coefficients of (L psi)(y_j) for piecewise-linear psi. Rows are built
/// in parallel.
inline DenseMatrix gkw_matrix(const AlphaParam& alpha, double s, std::size_t n, TransferConfig cfg = {},
                              unsigned threads = 0) {
  if (n < 16) throw std::invalid_argument("gkw_matrix needs n >= 16");
  cfg.s = s;
  const auto fam = BranchCache::global().get(alpha, cfg);
  DenseMatrix m(n + 1, n + 1);
  auto build_rows = [&](std::size_t begin, std::size_t step) {
    for (std::size_t j = begin; j <= n; j += step) {
      detail::RowAssembler row(&m.data[j * (n + 1)], n, static_cast<double>(j) / static_cast<double>(n), 2.0 * s);
      for (const auto& b : fam->fast) row.branch(b);
      for (const auto& c : fam->chains) row.chain(c);
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n + 1));
  if (threads == 1) {
    build_rows(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(build_rows, t, threads);
    for (auto& t : pool) t.join();
  }
  return m;
}

struct EigenPair {
  double lambda = 0.0;
  GridDensity vector;
  std::size_t iterations = 0;
};

/// Power iteration from the constant vector, normalized to unit trapezoid L1
/// norm. Stops when consecutive eigenvalue estimates differ by less than tol.
inline EigenPair leading_eigen(const DenseMatrix& m, double tol = 1e-12, std::size_t max_iter = 10000) {
  if (m.rows != m.cols || m.rows < 2) throw std::invalid_argument("leading_eigen needs a square matrix");
  if (std::any_of(m.data.begin(), m.data.end(), [](double x) { return x < 0; }))
    throw std::invalid_argument("leading_eigen needs a nonnegative matrix");
  std::vector<double> v(m.rows, 1.0);
  double lambda = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t it = 1; it <= max_iter; ++it) {
    std::vector<double> w = m.apply(v);
    const double norm = GridDensity::trapezoid_l1(w);
    if (!(norm > 0) || !std::isfinite(norm)) throw ConvergenceError("power iteration collapsed", lambda, v);
    for (auto& x : w) x /= norm;
    const double prev = lambda;
    lambda = norm;
    v = std::move(w);
    if (std::fabs(lambda - prev) < tol) return {lambda, GridDensity{m.rows - 1, v}, it};
  }
  throw ConvergenceError("power iteration did not converge", lambda, v);
}

}  // namespace cfmaps
