#ifndef COPDEP_GRID_HPP
#define COPDEP_GRID_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <thread>
#include <vector>

#include "copdep/core.hpp"

namespace copdep {

inline double logit(double p) { return std::log(p / (1.0 - p)); }
inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// n sorted points spanning [lo, hi] inclusive.
inline std::vector<double> axis_points(double lo, double hi, int n, Spacing spacing) {
  std::vector<double> x(static_cast<std::size_t>(n));
  if (n == 1) {
    x[0] = 0.5 * (lo + hi);
    return x;
  }
  if (spacing == Spacing::Uniform) {
    for (int i = 0; i < n; ++i) x[i] = lo + (hi - lo) * i / (n - 1);
  } else {
    const double a = logit(lo);
    const double b = logit(hi);
    for (int i = 0; i < n; ++i) x[i] = logistic(a + (b - a) * i / (n - 1));
  }
  x.front() = lo;
  x.back() = hi;
  return x;
}

inline std::vector<double> grid_u(const GridConfig& g) {
  if (g.region) return axis_points(g.region->u_lo, g.region->u_hi, g.n_u, g.spacing);
  return axis_points(g.margin, 1.0 - g.margin, g.n_u, g.spacing);
}

inline std::vector<double> grid_v(const GridConfig& g) {
  if (g.region) return axis_points(g.region->v_lo, g.region->v_hi, g.n_v, g.spacing);
  return axis_points(g.margin, 1.0 - g.margin, g.n_v, g.spacing);
}

/// Worker count: COPULA_THREADS if set to a positive integer, else hardware concurrency.
inline unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("COPULA_THREADS")) {
    unsigned cap = 0;
    auto [p, ec] = std::from_chars(env, env + std::strlen(env), cap);
    if (ec == std::errc() && cap > 0) n = cap;
  }
  return n;
}

/// Runs body(i) for i in [0, n). Rows are interleaved across workers;
/// callers store per-row results and reduce them in row order.
template <class Body>
void parallel_rows(int n, Body&& body) {
  const unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(std::max(n, 1)));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int i = static_cast<int>(w); i < n; i += static_cast<int>(workers)) body(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace copdep

#endif  // COPDEP_GRID_HPP
