#ifndef COPDEP_ARCHIMEDEAN_HPP
#define COPDEP_ARCHIMEDEAN_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "copdep/core.hpp"
#include "copdep/errors.hpp"
#include "copdep/grid.hpp"
#include "copdep/properties.hpp"
#include "copdep/verdict.hpp"

namespace copdep {

enum class Smoothness { Generic, TwiceDifferentiable, CompletelyMonotone };

inline const char* to_string(Smoothness s) {
  switch (s) {
    case Smoothness::Generic: return "generic";
    case Smoothness::TwiceDifferentiable: return "twice-differentiable";
    case Smoothness::CompletelyMonotone: return "completely-monotone";
  }
  return "?";
}

using Fn1 = std::function<double(double)>;

struct GeneratorSpec {
  Fn1 phi;
  Fn1 psi;
  Fn1 d_minus_psi;
  Fn1 d2_psi;  // empty unless supplied in closed form
  double phi_at_zero = std::numeric_limits<double>::infinity();
  bool strict = true;
  bool normalized = false;
  bool exact_d_minus_psi = false;
  Smoothness smoothness = Smoothness::Generic;
  std::vector<double> declared_jumps;  // x-locations where D^-psi jumps
  std::string label = "custom";
};

/// Closed forms supplied by the caller; at least one of phi, psi is required.
struct GeneratorInput {
  Fn1 phi;
  Fn1 psi;
  Fn1 d_minus_psi;
  Fn1 d2_psi;
  Smoothness smoothness = Smoothness::Generic;
  std::vector<double> declared_jumps;
  std::optional<bool> strict;
  std::string label = "custom";
};

namespace detail {

// Smallest x with psi(x) == 0, or +inf when psi stays positive.
inline double psi_zero(const Fn1& psi, std::optional<bool> strict) {
  if (strict && *strict) return std::numeric_limits<double>::infinity();
  double hi = 1.0;
  while (psi(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e300) return std::numeric_limits<double>::infinity();
  }
  double lo = 0.0;
  // A zero this far out is overflow in psi's closed form, not a finite phi(0).
  if (hi > 1e100) return std::numeric_limits<double>::infinity();
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (psi(mid) > 0.0 ? lo : hi) = mid;
  }
  // Underflow of a strictly positive psi is not a genuine zero.
  if (!strict && psi(hi * (1.0 - 1e-3)) < 1e-200) return std::numeric_limits<double>::infinity();
  return hi;
}

inline double invert_phi(const Fn1& phi, double x) {
  double lo = 0.0, hi = 1.0;  // phi(lo) >= x > phi(hi)
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (phi(mid) > x ? lo : hi) = mid;
  }
  return hi;
}

inline double invert_psi(const Fn1& psi, double t, double x_max) {
  double lo = 0.0;
  double hi = std::isfinite(x_max) ? x_max : 1.0;
  while (!std::isfinite(x_max) && psi(hi) > t) {
    hi *= 2.0;
    if (hi > 1e300) return std::numeric_limits<double>::infinity();
  }
  for (int it = 0; it < 4000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (psi(mid) > t ? lo : hi) = mid;
  }
  return hi;
}

inline Fn1 backward_difference(Fn1 psi) {
  return [psi = std::move(psi)](double x) {
    const double h = std::min(std::max(1e-7, 1e-7 * x), 0.5 * x);
    if (!(h > 0.0)) return -std::numeric_limits<double>::infinity();
    const double fx = psi(x);
    const double d1 = (fx - psi(x - h)) / h;
    const double d2 = (fx - psi(x - 0.5 * h)) / (0.5 * h);
    return 2.0 * d2 - d1;
  };
}

inline void validate_decreasing_convex(const std::vector<double>& x, const std::vector<double>& y,
                                       const char* name) {
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (!(y[i + 1] < y[i])) {
      throw ValidationError(std::string(name) + " is not strictly decreasing near " + format_number(x[i + 1]));
    }
  }
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    const double s0 = (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
    const double s1 = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    if (s1 - s0 < -1e-9 * (1.0 + std::abs(s0))) {
      throw ValidationError(std::string(name) + " is not convex at " + format_number(x[i]));
    }
  }
}

}  // namespace detail

inline GeneratorSpec make_generator(GeneratorInput in) {
  if (!in.phi && !in.psi) throw ValidationError("make_generator: supply phi or psi");
  GeneratorSpec g;
  g.label = in.label;
  g.smoothness = in.smoothness;
  g.declared_jumps = in.declared_jumps;
  std::sort(g.declared_jumps.begin(), g.declared_jumps.end());

  if (in.phi) {
    g.phi_at_zero = in.phi(0.0);
    if (std::isnan(g.phi_at_zero) || g.phi_at_zero <= 0.0) {
      throw ValidationError("make_generator: phi(0) must be positive or +inf");
    }
  } else {
    g.phi_at_zero = detail::psi_zero(in.psi, in.strict);
  }
  g.strict = in.strict.value_or(std::isinf(g.phi_at_zero));
  if (g.strict) g.phi_at_zero = std::numeric_limits<double>::infinity();

  if (in.phi) {
    g.phi = in.phi;
  } else {
    const double x0 = g.phi_at_zero;
    g.phi = [psi = in.psi, x0](double t) {
      if (t >= 1.0) return 0.0;
      if (t <= 0.0) return x0;
      return detail::invert_psi(psi, t, x0);
    };
  }
  if (in.psi) {
    g.psi = in.psi;
  } else {
    const double x0 = g.phi_at_zero;
    g.psi = [phi = in.phi, x0](double x) {
      if (x <= 0.0) return 1.0;
      if (x >= x0) return 0.0;
      return detail::invert_phi(phi, x);
    };
  }
  g.exact_d_minus_psi = static_cast<bool>(in.d_minus_psi);
  g.d_minus_psi = in.d_minus_psi ? in.d_minus_psi : detail::backward_difference(g.psi);
  g.d2_psi = in.d2_psi;

  // Validation on a 10^3-point grid.
  std::vector<double> ts, ph;
  for (int i = 1; i <= 1000; ++i) ts.push_back(i / 1000.0);
  for (double t : ts) ph.push_back(g.phi(t));
  if (std::abs(g.phi(1.0)) > 1e-10) throw ValidationError("generator: phi(1) must be 0");
  if (in.phi) {
    detail::validate_decreasing_convex(ts, ph, "phi");
  } else {
    std::vector<double> xs(ph.rbegin(), ph.rend()), ps;
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    for (double x : xs) ps.push_back(g.psi(x));
    detail::validate_decreasing_convex(xs, ps, "psi");
  }
  if (std::abs(g.psi(0.0) - 1.0) > 1e-12) throw ValidationError("generator: psi(0) must be 1");
  g.normalized = std::abs(g.phi(0.5) - 1.0) <= 1e-10;
  return g;
}

/// Returns the generator for copula phi scaled by `factor` (same copula).
inline GeneratorSpec scale_generator(const GeneratorSpec& g, double factor) {
  GeneratorSpec s = g;
  s.phi = [phi = g.phi, factor](double t) { return factor * phi(t); };
  s.psi = [psi = g.psi, factor](double x) { return psi(x / factor); };
  s.d_minus_psi = [d = g.d_minus_psi, factor](double x) { return d(x / factor) / factor; };
  if (g.d2_psi) s.d2_psi = [d = g.d2_psi, factor](double x) { return d(x / factor) / (factor * factor); };
  s.phi_at_zero = g.phi_at_zero * factor;
  for (double& x : s.declared_jumps) x *= factor;
  s.normalized = std::abs(s.phi(0.5) - 1.0) <= 1e-10;
  return s;
}

inline GeneratorSpec builtin_archimedean(const std::string& name, const std::map<std::string, double>& params = {}) {
  constexpr double ln2 = std::numbers::ln2;
  if (name == "gumbel" || name == "pi") {
    double alpha = 1.0;
    if (name == "gumbel") {
      auto it = params.find("alpha");
      if (it == params.end()) throw ValidationError("gumbel: missing parameter alpha");
      alpha = it->second;
    }
    if (!(alpha >= 1.0) || !std::isfinite(alpha)) throw ValidationError("gumbel: requires alpha >= 1");
    const double a = 1.0 / alpha;
    GeneratorInput in;
    in.label = name;
    in.phi = [alpha](double t) {
      if (t <= 0.0) return std::numeric_limits<double>::infinity();
      return std::pow(-std::log(t) / ln2, alpha);
    };
    in.psi = [a](double x) { return std::exp(-std::pow(x, a) * ln2); };
    in.d_minus_psi = [a](double x) { return -(ln2 * a) * std::pow(x, a - 1.0) * std::exp(-std::pow(x, a) * ln2); };
    in.d2_psi = [a](double x) {
      const double xa = std::pow(x, a);
      return std::exp(-xa * ln2) * ln2 * a * std::pow(x, a - 2.0) * (ln2 * a * xa + 1.0 - a);
    };
    in.smoothness = Smoothness::CompletelyMonotone;
    in.strict = true;
    return make_generator(in);
  }
  if (name == "w") {
    GeneratorInput in;
    in.label = "w";
    in.phi = [](double t) { return 1.0 - t; };
    in.psi = [](double x) { return std::max(1.0 - x, 0.0); };
    in.d_minus_psi = [](double x) { return x <= 1.0 ? -1.0 : 0.0; };
    in.strict = false;
    return make_generator(in);
  }
  if (name == "spreeuw") {
    GeneratorInput in;
    in.label = "spreeuw";
    in.psi = [](double x) { return std::exp(-std::asinh(x) / 10.0); };
    in.phi = [](double t) {
      if (t <= 0.0) return std::numeric_limits<double>::infinity();
      return std::sinh(-10.0 * std::log(t));
    };
    in.d_minus_psi = [](double x) { return -std::exp(-std::asinh(x) / 10.0) / (10.0 * std::hypot(1.0, x)); };
    in.d2_psi = [](double x) {
      const double q = 1.0 + x * x;
      return std::exp(-std::asinh(x) / 10.0) / q * (0.01 + x / (10.0 * std::sqrt(q)));
    };
    in.smoothness = Smoothness::TwiceDifferentiable;
    in.strict = true;
    return make_generator(in);
  }
  throw ValidationError("unknown Archimedean family '" + name + "'");
}

/// f0(u) = psi(phi(0) - phi(u)); 0 for strict generators.
inline double zero_level(const GeneratorSpec& g, double u) {
  if (g.strict) return 0.0;
  return g.psi(g.phi_at_zero - g.phi(u));
}

inline double arch_kernel(const GeneratorSpec& g, double u, double v) {
  if (v <= 0.0) return 0.0;
  if (v >= 1.0) return 1.0;
  if (u <= 0.0 || u >= 1.0) return 1.0;
  if (!g.strict && v < zero_level(g, u)) return 0.0;
  const double xu = g.phi(u);
  const double den = g.d_minus_psi(xu);
  if (!(den < 0.0)) {
    throw NumericalError("arch_kernel: D^-psi(phi(u)) is not negative at u=" + format_number(u) +
                         (g.strict ? " for a strict generator" : ""));
  }
  return std::clamp(g.d_minus_psi(xu + g.phi(v)) / den, 0.0, 1.0);
}

inline double arch_cdf(const GeneratorSpec& g, double u, double v) {
  if (u <= 0.0 || v <= 0.0) return 0.0;
  if (u >= 1.0) return std::min(v, 1.0);
  if (v >= 1.0) return u;
  return g.psi(g.phi(u) + g.phi(v));
}

inline Copula make_archimedean_copula(const GeneratorSpec& g, std::string family, std::vector<Param> params) {
  auto cdf = [g](double u, double v) { return arch_cdf(g, u, v); };
  auto kernel = [g](double u, double v) { return arch_kernel(g, u, v); };
  std::optional<Copula::Fn2> density;
  if (g.strict && g.d2_psi) {
    density = [g](double u, double v) {
      const double xu = g.phi(u), xv = g.phi(v);
      return g.d2_psi(xu + xv) / (g.d_minus_psi(xu) * g.d_minus_psi(xv));
    };
  }
  auto breaks = [g](double v) {
    std::vector<double> b;
    if (!g.strict) b.push_back(zero_level(g, v));
    const double xv = g.phi(v);
    for (double xj : g.declared_jumps) {
      if (xj > xv) b.push_back(g.psi(xj - xv));
    }
    return b;
  };
  return Copula(std::move(family), std::move(params), cdf, kernel, density, breaks);
}

/// x-grid phi(t) for `n` uniform t in [margin, 1-margin], ascending in x.
inline std::vector<double> generator_x_grid(const GeneratorSpec& g, double margin, int n = 2001) {
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(n));
  for (int i = n - 1; i >= 0; --i) {
    const double t = margin + (1.0 - 2.0 * margin) * i / (n - 1);
    xs.push_back(g.phi(t));
  }
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

inline Verdict scan_dminus_psi_continuity(const GeneratorSpec& g, const GridConfig& grid, double tol_jump = 1e-3) {
  if (!g.declared_jumps.empty()) {
    const double x = g.declared_jumps.front();
    Witness w;
    w.kind = WitnessKind::Jump;
    w.coords = {x};
    w.values = {g.d_minus_psi(x), g.d_minus_psi(x * (1.0 + 1e-9) + 1e-12)};
    w.defect = std::abs(w.values[1] - w.values[0]);
    return analytic(Status::Fails, "declared discontinuity of D^-psi", w);
  }
  const auto xs = generator_x_grid(g, grid.margin);
  const auto& D = g.d_minus_psi;
  auto rel_gap = [&](double x, double d, std::vector<double>* vals) {
    const double a = D(x * (1.0 - d)), b = D(x * (1.0 + d));
    if (vals) *vals = {a, b};
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0.0 ? std::abs(b - a) / scale : 0.0;
  };
  // Screen consecutive grid intervals: a jump shows up as an isolated large step.
  std::vector<double> dv(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) dv[i] = D(xs[i]);
  auto step = [&](std::size_t i) {
    const double scale = std::max(std::abs(dv[i]), std::abs(dv[i + 1]));
    return scale > 0.0 ? std::abs(dv[i + 1] - dv[i]) / scale : 0.0;
  };
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double s = step(i);
    const double left = i > 0 ? step(i - 1) : 0.0;
    const double right = i + 2 < xs.size() ? step(i + 1) : 0.0;
    if (!(s > tol_jump && s > 4.0 * std::max(left, right))) continue;
    // D^-psi is non-decreasing: bisect for the crossing of the midpoint value.
    double lo = xs[i], hi = xs[i + 1];
    const double mid_value = 0.5 * (dv[i] + dv[i + 1]);
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (lo + hi);
      if (m <= lo || m >= hi) break;
      (D(m) < mid_value ? lo : hi) = m;
    }
    const double x = hi;
    double gap_min = std::numeric_limits<double>::infinity();
    std::vector<double> vals;
    for (double d : {1e-3, 1e-4, 1e-5}) gap_min = std::min(gap_min, rel_gap(x, d, &vals));
    worst = std::max(worst, gap_min);
    if (gap_min > tol_jump) {
      Verdict v;
      v.status = Status::Fails;
      v.method = Method::Grid;
      v.certificate.points = static_cast<int>(xs.size());
      v.certificate.margin = grid.margin;
      v.note = "relative jump of D^-psi persists for steps 1e-3, 1e-4, 1e-5";
      Witness w;
      w.kind = WitnessKind::Jump;
      w.coords = {x};
      w.values = vals;
      w.defect = gap_min;
      v.witness = w;
      v.worst_defect = gap_min;
      return v;
    }
  }
  Verdict v;
  v.status = Status::Holds;
  v.method = Method::Grid;
  v.certificate.points = static_cast<int>(xs.size());
  v.certificate.margin = grid.margin;
  v.worst_defect = worst;
  v.note = "no persistent jump of D^-psi above the relative tolerance " + format_number(tol_jump);
  return v;
}

struct ArchReport {
  bool strict = true;
  Verdict d_minus_psi_continuous;
  Verdict tp2_ltd;
  Verdict mktp2_si;
  Verdict dtp2;
  Verdict pqd;
};

namespace detail {

inline Witness cdf_rect(const GeneratorSpec& g, double u1, double u2, double v1, double v2) {
  return rect_witness(u1, u2, v1, v2, arch_cdf(g, u1, v1), arch_cdf(g, u1, v2), arch_cdf(g, u2, v1),
                      arch_cdf(g, u2, v2));
}

// Fixed point of the involution f0 on (0,1).
inline double zero_level_fixed_point(const GeneratorSpec& g) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (zero_level(g, mid) > mid ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

inline ArchReport classify_archimedean(const GeneratorSpec& g, const GridConfig& grid) {
  grid.validate();
  ArchReport r;
  r.strict = g.strict;
  r.d_minus_psi_continuous = scan_dminus_psi_continuity(g, grid);
  const auto xs = generator_x_grid(g, grid.margin);

  if (!g.strict) {
    // C(u1,v1) = 0 while the other three corners are positive.
    const double p0 = detail::zero_level_fixed_point(g);
    const double p = 0.5 * p0;
    const double q = std::max(0.5 * (1.0 + p0), 0.5 * (1.0 + zero_level(g, p)));
    r.tp2_ltd = analytic(Status::Fails, "non-strict generator: C vanishes on {v < f0(u)}",
                         detail::cdf_rect(g, p, q, p, q));
    // K(u1,v) = 0 < K(u2,v) across the zero-level curve.
    const double v = 0.5;
    const double us = zero_level(g, v);
    const double u1 = 0.5 * us, u2 = 0.5 * (1.0 + us);
    Witness w;
    w.kind = WitnessKind::Segment;
    w.rect = {u1, u2, v, v};
    w.values = {arch_kernel(g, u1, v), arch_kernel(g, u2, v)};
    w.defect = w.values[1] - w.values[0];
    r.mktp2_si = analytic(Status::Fails, "non-strict generator: kernel vanishes on {v < f0(u)}", w);
    r.dtp2 = not_applicable("non-strict generator");
    auto cop = make_archimedean_copula(g, g.label, {});
    r.pqd = check_pqd(cop, grid);
    return r;
  }

  r.tp2_ltd = log_convexity_test(g.psi, xs, grid.tol_eq, grid.tol_strict);
  r.tp2_ltd.method = Method::Analytic;
  r.tp2_ltd.note = "psi log-convex on phi([margin, 1-margin]); " + r.tp2_ltd.note;

  if (r.d_minus_psi_continuous.status == Status::Fails) {
    r.mktp2_si = r.d_minus_psi_continuous;
    r.mktp2_si.method = Method::Analytic;
    r.mktp2_si.note = "D^-psi has a discontinuity, so C is not SI";
  } else {
    r.mktp2_si = log_convexity_test([d = g.d_minus_psi](double x) { return -d(x); }, xs, grid.tol_eq,
                                    grid.tol_strict);
    r.mktp2_si.method = Method::Analytic;
    r.mktp2_si.note = "-D^-psi log-convex on phi([margin, 1-margin]); " + r.mktp2_si.note;
  }

  if (g.smoothness == Smoothness::Generic) {
    r.dtp2 = not_applicable("psi not declared twice differentiable");
  } else {
    Fn1 d2 = g.d2_psi;
    if (!d2) {
      d2 = [psi = g.psi](double x) {
        const double h = std::min(1e-4 * (1.0 + x), 0.25 * x);
        return (psi(x + h) - 2.0 * psi(x) + psi(x - h)) / (h * h);
      };
    }
    r.dtp2 = log_convexity_test(d2, xs, grid.tol_eq, grid.tol_strict);
    r.dtp2.method = Method::Analytic;
    r.dtp2.note = "psi'' log-convex on phi([margin, 1-margin]); " + r.dtp2.note;
  }

  if (r.tp2_ltd.holds()) {
    r.pqd = analytic(Status::Holds, "implied by TP2");
    r.pqd.certificate = r.tp2_ltd.certificate;
  } else {
    r.pqd = check_pqd(make_archimedean_copula(g, g.label, {}), grid);
  }
  return r;
}

}  // namespace copdep

#endif  // COPDEP_ARCHIMEDEAN_HPP
