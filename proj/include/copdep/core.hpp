#ifndef COPDEP_CORE_HPP
#define COPDEP_CORE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "copdep/errors.hpp"
#include "copdep/normal.hpp"

namespace copdep {

struct Rectangle {
  double u1 = 0.0;
  double u2 = 0.0;
  double v1 = 0.0;
  double v2 = 0.0;

  [[nodiscard]] bool valid() const {
    return 0.0 < u1 && u1 <= u2 && u2 < 1.0 && 0.0 < v1 && v1 <= v2 && v2 < 1.0;
  }
};

enum class Spacing { Uniform, Logit };

/// Closed sub-square [u_lo,u_hi] x [v_lo,v_hi] replacing the margin-based extent.
struct Region {
  double u_lo = 0.0;
  double u_hi = 1.0;
  double v_lo = 0.0;
  double v_hi = 1.0;
};

struct GridConfig {
  int n_u = 256;
  int n_v = 256;
  double margin = 0.005;
  double tol_eq = 1e-12;
  double tol_strict = 1e-9;
  Spacing spacing = Spacing::Uniform;
  std::optional<Region> region;
  bool refine = true;

  void validate() const {
    if (n_u < 2 || n_v < 2) throw ValidationError("grid: n_u and n_v must be at least 2");
    if (!(margin > 0.0 && margin < 0.5)) throw ValidationError("grid: margin must lie in (0, 0.5)");
    if (!(tol_eq >= 0.0 && tol_strict >= tol_eq)) {
      throw ValidationError("grid: tolerances must satisfy tol_strict >= tol_eq >= 0");
    }
    if (region) {
      const auto& r = *region;
      if (!(0.0 < r.u_lo && r.u_lo < r.u_hi && r.u_hi < 1.0 && 0.0 < r.v_lo && r.v_lo < r.v_hi &&
            r.v_hi < 1.0)) {
        throw ValidationError("grid: region must be a non-degenerate sub-square of (0,1)^2");
      }
    }
  }
};

using Param = std::pair<std::string, double>;

inline std::string format_number(double x) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(12);
  os << x;
  return os.str();
}

inline std::string make_label(const std::string& family, const std::vector<Param>& params) {
  std::string out = family;
  if (params.empty()) return out;
  out += '(';
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out += ',';
    out += params[i].first + '=' + format_number(params[i].second);
  }
  out += ')';
  return out;
}

/// A bivariate copula given by its cdf and a version of its Markov kernel
/// K(u,[0,v]). Immutable; all members are pure functions.
class Copula {
 public:
  using Fn2 = std::function<double(double, double)>;
  using BreakFn = std::function<std::vector<double>(double)>;
  using Admissible = std::function<bool(double, double)>;

  Copula(std::string family, std::vector<Param> params, Fn2 cdf, Fn2 kernel,
         std::optional<Fn2> density = std::nullopt, BreakFn breaks = {})
      : family_(std::move(family)),
        params_(std::move(params)),
        cdf_(std::move(cdf)),
        kernel_(std::move(kernel)),
        density_(std::move(density)),
        breaks_(std::move(breaks)) {}

  [[nodiscard]] double cdf(double u, double v) const { return cdf_(u, v); }
  [[nodiscard]] double kernel(double u, double v) const { return kernel_(u, v); }
  [[nodiscard]] bool has_density() const { return density_.has_value(); }
  [[nodiscard]] double density(double u, double v) const {
    if (!density_) throw PreconditionError(label() + " has no density");
    return (*density_)(u, v);
  }

  /// u-locations in (0,1) where u -> kernel(u,v) may jump.
  [[nodiscard]] std::vector<double> kernel_breaks(double v) const {
    if (!breaks_) return {};
    auto b = breaks_(v);
    std::erase_if(b, [](double x) { return !(x > 0.0 && x < 1.0); });
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
  }

  /// Optional restriction of MK-TP2 rectangles by their lower-right corner (u2,v1).
  [[nodiscard]] bool admissible(double u2, double v1) const {
    return !admissible_ || admissible_(u2, v1);
  }
  void set_admissible(Admissible f) { admissible_ = std::move(f); }

  [[nodiscard]] const std::string& family() const { return family_; }
  [[nodiscard]] const std::vector<Param>& params() const { return params_; }
  [[nodiscard]] std::string label() const { return make_label(family_, params_); }

 private:
  std::string family_;
  std::vector<Param> params_;
  Fn2 cdf_;
  Fn2 kernel_;
  std::optional<Fn2> density_;
  BreakFn breaks_;
  Admissible admissible_;
};

enum class Baseline { Pi, M, W };

namespace detail {

inline double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

inline double pi_cdf(double u, double v) { return u * v; }
inline double m_cdf(double u, double v) { return std::min(u, v); }
inline double w_cdf(double u, double v) { return std::max(u + v - 1.0, 0.0); }

// Right-continuous versions in v.
inline double m_kernel(double u, double v) { return v >= u ? 1.0 : 0.0; }
inline double w_kernel(double u, double v) { return v >= 1.0 - u ? 1.0 : 0.0; }

inline double kernel_bounds(double v) { return v <= 0.0 ? 0.0 : 1.0; }

}  // namespace detail

inline Copula make_baseline(Baseline name) {
  switch (name) {
    case Baseline::Pi:
      return Copula(
          "pi", {}, detail::pi_cdf,
          [](double, double v) { return detail::clamp01(v); },
          Copula::Fn2([](double, double) { return 1.0; }));
    case Baseline::M:
      return Copula("m", {}, detail::m_cdf, [](double u, double v) {
        if (v <= 0.0 || v >= 1.0) return detail::kernel_bounds(v);
        return detail::m_kernel(u, v);
      }, std::nullopt, [](double v) { return std::vector<double>{v}; });
    case Baseline::W:
      return Copula("w", {}, detail::w_cdf, [](double u, double v) {
        if (v <= 0.0 || v >= 1.0) return detail::kernel_bounds(v);
        return detail::w_kernel(u, v);
      }, std::nullopt, [](double v) { return std::vector<double>{1.0 - v}; });
  }
  throw ValidationError("unknown baseline copula");
}

inline Copula make_frechet(double alpha, double beta, double tol_eq = 1e-12) {
  if (!(alpha >= 0.0 && alpha <= 1.0 && beta >= 0.0 && beta <= 1.0)) {
    throw ValidationError("frechet: alpha and beta must lie in [0,1]");
  }
  if (alpha + beta > 1.0 + tol_eq) throw ValidationError("frechet: requires alpha + beta <= 1");
  const double gamma = std::max(0.0, 1.0 - alpha - beta);
  auto cdf = [=](double u, double v) {
    return alpha * detail::m_cdf(u, v) + gamma * u * v + beta * detail::w_cdf(u, v);
  };
  auto kernel = [=](double u, double v) {
    if (v <= 0.0 || v >= 1.0) return detail::kernel_bounds(v);
    return alpha * detail::m_kernel(u, v) + gamma * v + beta * detail::w_kernel(u, v);
  };
  std::optional<Copula::Fn2> density;
  if (alpha == 0.0 && beta == 0.0) density = [](double, double) { return 1.0; };
  auto breaks = [=](double v) {
    std::vector<double> b;
    if (alpha > 0.0) b.push_back(v);
    if (beta > 0.0) b.push_back(1.0 - v);
    return b;
  };
  return Copula("frechet", {{"alpha", alpha}, {"beta", beta}}, cdf, kernel, density, breaks);
}

inline Copula make_fgm(double theta) {
  if (!(theta >= -1.0 && theta <= 1.0)) throw ValidationError("fgm: requires |theta| <= 1");
  auto cdf = [=](double u, double v) { return u * v + theta * u * v * (1.0 - u) * (1.0 - v); };
  auto kernel = [=](double u, double v) {
    if (v <= 0.0 || v >= 1.0) return detail::kernel_bounds(v);
    return v + theta * v * (1.0 - v) * (1.0 - 2.0 * u);
  };
  auto density = [=](double u, double v) { return 1.0 + theta * (1.0 - 2.0 * u) * (1.0 - 2.0 * v); };
  return Copula("fgm", {{"theta", theta}}, cdf, kernel, Copula::Fn2(density));
}

inline Copula make_gaussian(double rho) {
  if (!(rho > -1.0 && rho < 1.0)) throw ValidationError("gaussian: requires rho in (-1,1)");
  if (rho == 0.0) throw ValidationError("gaussian: rho = 0 is the independence copula, use pi");
  const double s = std::sqrt((1.0 - rho) * (1.0 + rho));
  auto cdf = [=](double u, double v) {
    if (u <= 0.0 || v <= 0.0) return 0.0;
    if (u >= 1.0) return std::min(v, 1.0);
    if (v >= 1.0) return u;
    return bivariate_normal_cdf(std_normal_quantile(u), std_normal_quantile(v), rho);
  };
  auto kernel = [=](double u, double v) {
    if (v <= 0.0 || v >= 1.0) return detail::kernel_bounds(v);
    if (u <= 0.0) return rho > 0.0 ? 1.0 : 0.0;
    if (u >= 1.0) return rho > 0.0 ? 0.0 : 1.0;
    return std_normal_cdf((std_normal_quantile(v) - rho * std_normal_quantile(u)) / s);
  };
  auto density = [=](double u, double v) {
    const double x = std_normal_quantile(u);
    const double y = std_normal_quantile(v);
    const double q = (rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * s * s);
    return std::exp(-q) / s;
  };
  return Copula("gaussian", {{"rho", rho}}, cdf, kernel, Copula::Fn2(density));
}

}  // namespace copdep

#endif  // COPDEP_CORE_HPP
