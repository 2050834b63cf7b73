#ifndef COPDEP_SAMPLER_HPP
#define COPDEP_SAMPLER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "copdep/core.hpp"
#include "copdep/errors.hpp"
#include "copdep/grid.hpp"

namespace copdep {

/// Output k of the SplitMix64 stream started at `seed`.
inline std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t z = seed + (k + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Open-interval uniform from the top 52 bits.
inline double uniform01(std::uint64_t x) { return (static_cast<double>(x >> 12) + 0.5) * 0x1.0p-52; }

struct SampleBatch {
  std::vector<std::pair<double, double>> points;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::string label;
};

/// Generalised inverse inf{v : kernel(u,v) >= w} by bisection.
inline double invert_kernel(const Copula& c, double u, double w, double tol = 1e-10, int max_iter = 200) {
  double lo = 0.0, hi = 1.0;
  int it = 0;
  for (; it < max_iter && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    (c.kernel(u, mid) >= w ? hi : lo) = mid;
  }
  if (hi - lo > tol) {
    std::clog << "warning: kernel inversion hit the iteration cap at u=" << format_number(u) << '\n';
    return 0.5 * (lo + hi);
  }
  return hi;
}

inline SampleBatch sample(const Copula& c, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("sample: requires n >= 1");
  SampleBatch b;
  b.seed = seed;
  b.n = n;
  b.label = c.label();
  b.points.resize(n);
  constexpr int block = 256;
  const int blocks = static_cast<int>((n + block - 1) / block);
  parallel_rows(blocks, [&](int bi) {
    const std::size_t lo = static_cast<std::size_t>(bi) * block;
    const std::size_t hi = std::min(n, lo + block);
    for (std::size_t i = lo; i < hi; ++i) {
      const double u = uniform01(splitmix64(seed, 2 * i));
      const double w = uniform01(splitmix64(seed, 2 * i + 1));
      b.points[i] = {u, invert_kernel(c, u, w)};
    }
  });
  return b;
}

/// max over the lattice {i/m} x {j/m} of |empirical cdf - cdf|.
inline double empirical_cdf_distance(const SampleBatch& b, const Copula& c, int m = 100) {
  if (b.points.empty()) throw ValidationError("empirical_cdf_distance: empty batch");
  if (m < 1) throw ValidationError("empirical_cdf_distance: requires m >= 1");
  const auto cell = [m](double x) {
    int k = static_cast<int>(std::ceil(x * m));
    while (k > 0 && static_cast<double>(k - 1) / m >= x) --k;
    while (k < m && static_cast<double>(k) / m < x) ++k;
    return std::clamp(k, 0, m);
  };
  const int s = m + 1;
  std::vector<double> cum(static_cast<std::size_t>(s * s), 0.0);
  for (const auto& [u, v] : b.points) cum[static_cast<std::size_t>(cell(u) * s + cell(v))] += 1.0;
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      double& x = cum[static_cast<std::size_t>(i * s + j)];
      if (i > 0) x += cum[static_cast<std::size_t>((i - 1) * s + j)];
      if (j > 0) x += cum[static_cast<std::size_t>(i * s + j - 1)];
      if (i > 0 && j > 0) x -= cum[static_cast<std::size_t>((i - 1) * s + j - 1)];
    }
  }
  const double n = static_cast<double>(b.points.size());
  double worst = 0.0;
  for (int i = 1; i <= m; ++i) {
    for (int j = 1; j <= m; ++j) {
      const double a = static_cast<double>(i) / m, bb = static_cast<double>(j) / m;
      worst = std::max(worst, std::abs(cum[static_cast<std::size_t>(i * s + j)] / n - c.cdf(a, bb)));
    }
  }
  return worst;
}

inline void write_csv(std::ostream& os, const SampleBatch& b) {
  os << "u,v\n";
  char buf[64];
  for (const auto& [u, v] : b.points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", u, v);
    os << buf;
  }
}

}  // namespace copdep

#endif  // COPDEP_SAMPLER_HPP
