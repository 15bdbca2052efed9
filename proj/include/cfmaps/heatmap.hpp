#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "cfmaps/bigint.hpp"
#include "cfmaps/continued_fraction.hpp"
#include "cfmaps/maps.hpp"

namespace cfmaps {

/// T_alpha^k(x) at the cell centres (2i+1)/(2N) of an N x N grid, exactly.
/// Row i is alpha, column j is x. The centres of cells i and N-1-i add up to
/// 1, so the symmetry T_{1-alpha}(1-x) = T_alpha(x) is a pixel flip.
struct Heatmap {
  std::size_t n = 0;
  std::size_t iter = 1;
  std::vector<Rational> values;  // row-major

  const Rational& at(std::size_t i, std::size_t j) const { return values[i * n + j]; }

  /// round(255 v) with halves rounded up, in integers.
  std::uint8_t pixel(std::size_t i, std::size_t j) const {
    const Rational& v = at(i, j);
    const BigInt p = boost::multiprecision::numerator(v), q = boost::multiprecision::denominator(v);
    return static_cast<std::uint8_t>(BigInt((510 * p + q) / (2 * q)).convert_to<unsigned>());
  }
};

inline Rational grid_node(std::size_t i, std::size_t n) { return Rational(2 * i + 1, 2 * n); }

inline Heatmap render_heatmap(std::size_t n, std::size_t iter, Variant alpha_variant = Variant::minus,
                              unsigned threads = 0) {
  if (n < 16) throw std::invalid_argument("heatmap grid needs N >= 16");
  if (iter < 1) throw std::invalid_argument("heatmap needs k >= 1");
  Heatmap h{n, iter, std::vector<Rational>(n * n)};
  std::vector<ContinuedFraction> xs;
  for (std::size_t j = 0; j < n; ++j) xs.push_back(cf_from_rational(grid_node(j, n)));
  auto rows = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < n; i += step) {
      const AlphaParam alpha{cf_from_rational(grid_node(i, n), alpha_variant)};
      for (std::size_t j = 0; j < n; ++j) h.values[i * n + j] = cf_to_rational(t_alpha_iterate(alpha, xs[j], iter));
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(rows, t, threads);
  rows(0, threads);
  for (auto& t : pool) t.join();
  return h;
}

/// Binary PGM, maxval 255.
inline void write_pgm(std::ostream& os, const Heatmap& h) {
  os << "P5\n" << h.n << ' ' << h.n << "\n255\n";
  std::vector<char> row(h.n);
  for (std::size_t i = 0; i < h.n; ++i) {
    for (std::size_t j = 0; j < h.n; ++j) row[j] = static_cast<char>(h.pixel(i, j));
    os.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

/// alpha,x,value with 17 significant digits, one line per grid cell.
inline void write_csv(std::ostream& os, const Heatmap& h) {
  char buf[96];
  os << "alpha,x,value\r\n";
  for (std::size_t i = 0; i < h.n; ++i) {
    const double a = to_double(grid_node(i, h.n));
    for (std::size_t j = 0; j < h.n; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\r\n", a, to_double(grid_node(j, h.n)), to_double(h.at(i, j)));
      os << buf;
    }
  }
}

/// Writes via a temporary file in the same directory and a rename, so readers
/// never see a partial file.
template <class Writer>
void write_file_atomic(const std::filesystem::path& path, Writer&& write, bool binary = false) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  auto fail = [&](const char* what) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw std::filesystem::filesystem_error(what, tmp, std::make_error_code(std::errc::io_error));
  };
  {
    std::ofstream os(tmp, binary ? std::ios::binary : std::ios::out);
    if (!os) fail("cannot open for writing");
    try {
      write(os);
    } catch (...) {
      os.close();
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw;
    }
    os.flush();
    if (!os) fail("write failed");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace cfmaps
