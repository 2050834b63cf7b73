#ifndef COPDEP_NORMAL_HPP
#define COPDEP_NORMAL_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "copdep/errors.hpp"

namespace copdep {

inline double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

inline double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("std_normal_quantile: p must lie in (0,1)");
  }
  // 1-p is exact for p >= 0.5, which keeps the upper tail accurate.
  if (p < 0.5) return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * (1.0 - p));
}

inline double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

namespace detail {

// Gauss-Legendre half-rules (6, 12 and 20 points) for the upper-orthant
// bivariate normal integral of A. Genz, "Numerical computation of
// rectangular bivariate and trivariate normal and t probabilities" (2004).
struct GaussLegendreHalf {
  int count;
  std::array<double, 10> x;
  std::array<double, 10> w;
};

inline constexpr std::array<GaussLegendreHalf, 3> kGenzRules{{
    {3,
     {-0.9324695142031522, -0.6612093864662647, -0.2386191860831970},
     {0.1713244923791705, 0.3607615730481384, 0.4679139345726904}},
    {6,
     {-0.9815606342467191, -0.9041172563704750, -0.7699026741943050,
      -0.5873179542866171, -0.3678314989981802, -0.1252334085114692},
     {0.04717533638651177, 0.1069393259953183, 0.1600783285433464,
      0.2031674267230659, 0.2334925365383547, 0.2491470458134029}},
    {10,
     {-0.9931285991850949, -0.9639719272779138, -0.9122344282513259,
      -0.8391169718222188, -0.7463319064601508, -0.6360536807265150,
      -0.5108670019508271, -0.3737060887154196, -0.2277858511416451,
      -0.07652652113349733},
     {0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
      0.08327674157670475, 0.1019301198172404, 0.1181945319615184,
      0.1316886384491766, 0.1420961093183821, 0.1491729864726037,
      0.1527533871307259}},
}};

/// P(X > h, Y > k) for a standard bivariate normal with correlation r.
inline double upper_orthant(double h, double k, double r) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const auto& rule = std::abs(r) < 0.3    ? kGenzRules[0]
                     : std::abs(r) < 0.75 ? kGenzRules[1]
                                          : kGenzRules[2];
  double hk = h * k;
  double bvn = 0.0;
  if (std::abs(r) < 0.925) {
    const double hs = 0.5 * (h * h + k * k);
    const double asr = std::asin(r);
    for (int i = 0; i < rule.count; ++i) {
      double sn = std::sin(asr * (rule.x[i] + 1.0) / 2.0);
      bvn += rule.w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      sn = std::sin(asr * (-rule.x[i] + 1.0) / 2.0);
      bvn += rule.w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
    }
    return bvn * asr / (2.0 * two_pi) + std_normal_cdf(-h) * std_normal_cdf(-k);
  }
  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  if (std::abs(r) < 1.0) {
    const double as = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    bvn = a * std::exp(-(bs / as + hk) / 2.0) *
          (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
    if (hk > -160.0) {
      const double b = std::sqrt(bs);
      bvn -= std::exp(-hk / 2.0) * std::sqrt(two_pi) * std_normal_cdf(-b / a) * b *
             (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a /= 2.0;
    for (int i = 0; i < rule.count; ++i) {
      double xs = a * (rule.x[i] + 1.0);
      xs *= xs;
      double rs = std::sqrt(1.0 - xs);
      bvn += a * rule.w[i] *
             (std::exp(-bs / (2.0 * xs) - hk / (1.0 + rs)) / rs -
              std::exp(-(bs / xs + hk) / 2.0) * (1.0 + c * xs * (1.0 + d * xs)));
      xs = as * (-rule.x[i] + 1.0) * (-rule.x[i] + 1.0) / 4.0;
      rs = std::sqrt(1.0 - xs);
      bvn += a * rule.w[i] * std::exp(-(bs / xs + hk) / 2.0) *
             (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
              (1.0 + c * xs * (1.0 + d * xs)));
    }
    bvn = -bvn / two_pi;
  }
  if (r > 0.0) return bvn + std_normal_cdf(-std::max(h, k));
  return -bvn + std::max(0.0, std_normal_cdf(-h) - std_normal_cdf(-k));
}

}  // namespace detail

/// P(X <= a, Y <= b) for a standard bivariate normal with correlation rho.
inline double bivariate_normal_cdf(double a, double b, double rho) {
  if (std::isinf(a) || std::isinf(b)) {
    if (a == -HUGE_VAL || b == -HUGE_VAL) return 0.0;
    if (a == HUGE_VAL) return std_normal_cdf(b);
    return std_normal_cdf(a);
  }
  return std::clamp(detail::upper_orthant(-a, -b, rho), 0.0, 1.0);
}

}  // namespace copdep

#endif  // COPDEP_NORMAL_HPP
