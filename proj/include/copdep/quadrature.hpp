#ifndef COPDEP_QUADRATURE_HPP
#define COPDEP_QUADRATURE_HPP

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <vector>

#include "copdep/core.hpp"

namespace copdep {

/// Integral of u -> kernel(u,v) over (0,1), split at the kernel's jumps.
inline double disintegrate(const Copula& c, double v) {
  using boost::math::quadrature::gauss_kronrod;
  std::vector<double> cuts{0.0};
  for (double b : c.kernel_breaks(v)) cuts.push_back(b);
  cuts.push_back(1.0);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    total += gauss_kronrod<double, 31>::integrate([&](double u) { return c.kernel(u, v); }, cuts[i], cuts[i + 1],
                                                  10, 1e-10);
  }
  return total;
}

}  // namespace copdep

#endif  // COPDEP_QUADRATURE_HPP
