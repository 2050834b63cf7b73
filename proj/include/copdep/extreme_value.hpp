#ifndef COPDEP_EXTREME_VALUE_HPP
#define COPDEP_EXTREME_VALUE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "copdep/core.hpp"
#include "copdep/errors.hpp"
#include "copdep/properties.hpp"
#include "copdep/verdict.hpp"

namespace copdep {

using Fn1 = std::function<double(double)>;

enum class PickandsSmoothness { Generic, C3AboveTStar };

inline const char* to_string(PickandsSmoothness s) {
  return s == PickandsSmoothness::Generic ? "generic" : "C3-on-interior";
}

struct PickandsSpec {
  Fn1 A;
  Fn1 d_plus_A;
  Fn1 d2_A;  // optional closed-form second derivative away from jumps
  std::optional<std::vector<double>> declared_jumps;  // nullopt: unknown
  PickandsSmoothness smoothness = PickandsSmoothness::Generic;
  double t_star = 0.0;
  bool exact_derivative = false;
  std::string label = "custom";
};

struct PickandsInput {
  Fn1 A;
  Fn1 d_plus_A;
  Fn1 d2_A;
  std::optional<std::vector<double>> declared_jumps;
  PickandsSmoothness smoothness = PickandsSmoothness::Generic;
  std::optional<double> t_star;
  std::string label = "custom";
};

inline PickandsSpec validate_pickands(PickandsInput in) {
  if (!in.A) throw ValidationError("validate_pickands: A is required");
  PickandsSpec s;
  s.A = in.A;
  s.label = in.label;
  s.smoothness = in.smoothness;
  s.d2_A = in.d2_A;
  s.exact_derivative = static_cast<bool>(in.d_plus_A);
  if (in.d_plus_A) {
    s.d_plus_A = in.d_plus_A;
  } else {
    s.d_plus_A = [A = in.A](double t) {
      constexpr double h = 1e-7;
      if (t + h <= 1.0) return (A(t + h) - A(t)) / h;
      return (A(t) - A(t - h)) / h;
    };
  }
  if (in.declared_jumps) {
    auto j = *in.declared_jumps;
    std::erase_if(j, [](double t) { return !(t > 0.0 && t < 1.0); });
    std::sort(j.begin(), j.end());
    s.declared_jumps = j;
  }

  const auto& A = s.A;
  const auto& D = s.d_plus_A;
  const double dtol = s.exact_derivative ? 1e-9 : 1e-6;
  if (std::abs(A(0.0) - 1.0) > 1e-10 || std::abs(A(1.0) - 1.0) > 1e-10) {
    throw ValidationError("pickands: requires A(0) = A(1) = 1");
  }
  constexpr int n = 1000;
  double prev_d = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / n;
    const double d = D(t);
    if (d < -1.0 - dtol || d > 1.0 + dtol) {
      throw ValidationError("pickands: slope bound -1 <= D+A(t) <= 1 violated at t=" + format_number(t) +
                            " (D+A=" + format_number(d) + ")");
    }
    if (d < prev_d - dtol) {
      throw ValidationError("pickands: D+A is not non-decreasing at t=" + format_number(t));
    }
    prev_d = d;
  }
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    const double a = A(t);
    if (a < std::max(1.0 - t, t) - 1e-10 || a > 1.0 + 1e-10) {
      throw ValidationError("pickands: bound max(1-t,t) <= A(t) <= 1 violated at t=" + format_number(t));
    }
    if (i > 0 && i < n) {
      const double dd = A(t - 1.0 / n) - 2.0 * a + A(t + 1.0 / n);
      if (dd < -1e-9) throw ValidationError("pickands: A is not convex at t=" + format_number(t));
    }
  }

  if (in.t_star) {
    s.t_star = *in.t_star;
  } else if (std::abs(D(0.0) + 1.0) <= 1e-6) {
    int k = 0;
    while (k + 1 < n && std::abs(D(static_cast<double>(k + 1) / n) + 1.0) <= 1e-6) ++k;
    double lo = static_cast<double>(k) / n, hi = static_cast<double>(k + 1) / n;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (std::abs(D(mid) + 1.0) <= 1e-6 ? lo : hi) = mid;
    }
    s.t_star = lo;
  }
  for (int i = 0; i <= 100; ++i) {
    const double t = s.t_star * i / 100.0;
    if (std::abs(A(t) - (1.0 - t)) > 1e-10) {
      throw ValidationError("pickands: A(t) = 1 - t must hold on [0, t_star]; fails at t=" + format_number(t));
    }
  }
  return s;
}

namespace detail {

inline double param(const std::map<std::string, double>& p, const std::string& family, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end()) throw ValidationError(family + ": missing parameter " + key);
  return it->second;
}

}  // namespace detail

inline PickandsSpec builtin_pickands(const std::string& name, const std::map<std::string, double>& params = {}) {
  PickandsInput in;
  in.label = name;
  in.declared_jumps = std::vector<double>{};
  in.smoothness = PickandsSmoothness::C3AboveTStar;
  if (name == "gumbel") {
    const double al = detail::param(params, name, "alpha");
    if (!(al >= 1.0) || !std::isfinite(al)) throw ValidationError("gumbel: requires alpha >= 1");
    in.A = [al](double t) { return std::pow(std::pow(t, al) + std::pow(1.0 - t, al), 1.0 / al); };
    in.d_plus_A = [al](double t) {
      const double S = std::pow(t, al) + std::pow(1.0 - t, al);
      return std::pow(S, 1.0 / al - 1.0) * (std::pow(t, al - 1.0) - std::pow(1.0 - t, al - 1.0));
    };
    in.d2_A = [al](double t) {
      const double S = std::pow(t, al) + std::pow(1.0 - t, al);
      return (al - 1.0) * std::pow(S, 1.0 / al - 2.0) * std::pow(t * (1.0 - t), al - 2.0);
    };
    in.t_star = 0.0;
  } else if (name == "marshall-olkin") {
    const double a = detail::param(params, name, "alpha");
    const double b = detail::param(params, name, "beta");
    if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0)) {
      throw ValidationError("marshall-olkin: requires alpha, beta in [0,1]");
    }
    const double t0 = (a + b > 0.0) ? a / (a + b) : 0.0;
    in.A = [a, b, t0](double t) { return t < t0 ? 1.0 - b * t : 1.0 - a * (1.0 - t); };
    in.d_plus_A = [a, b, t0](double t) { return t < t0 ? -b : a; };
    in.d2_A = [](double) { return 0.0; };
    if (t0 > 0.0 && t0 < 1.0) in.declared_jumps = std::vector<double>{t0};
    in.t_star = (b == 1.0 && t0 < 1.0) ? t0 : 0.0;
  } else if (name == "tawn-symmetric") {
    const double th = detail::param(params, name, "theta");
    if (!(th >= 0.0 && th <= 1.0)) throw ValidationError("tawn-symmetric: requires theta in [0,1]");
    in.A = [th](double t) { return th * t * t - th * t + 1.0; };
    in.d_plus_A = [th](double t) { return 2.0 * th * t - th; };
    in.d2_A = [th](double) { return 2.0 * th; };
    in.t_star = 0.0;
  } else if (name == "tawn-asym-mixed") {
    const double th = detail::param(params, name, "theta");
    const double ka = detail::param(params, name, "kappa");
    if (!(th >= 0.0)) throw ValidationError("tawn-asym-mixed: requires theta >= 0");
    if (!(th + 3.0 * ka >= 0.0)) throw ValidationError("tawn-asym-mixed: requires theta + 3 kappa >= 0");
    if (!(th + ka <= 1.0)) throw ValidationError("tawn-asym-mixed: requires theta + kappa <= 1");
    if (!(th + 2.0 * ka <= 1.0)) throw ValidationError("tawn-asym-mixed: requires theta + 2 kappa <= 1");
    in.A = [th, ka](double t) { return 1.0 - (th + ka) * t + th * t * t + ka * t * t * t; };
    in.d_plus_A = [th, ka](double t) { return -(th + ka) + 2.0 * th * t + 3.0 * ka * t * t; };
    in.d2_A = [th, ka](double t) { return 2.0 * th + 6.0 * ka * t; };
    in.t_star = 0.0;
  } else if (name == "log-example") {
    in.A = [](double t) { return (2.0 / 3.0) * std::log(std::pow(t, 1.5) + std::pow(1.0 - t, 1.5)) + 1.0; };
    in.d_plus_A = [](double t) {
      const double S = std::pow(t, 1.5) + std::pow(1.0 - t, 1.5);
      return (std::sqrt(t) - std::sqrt(1.0 - t)) / S;
    };
    in.d2_A = [](double t) {
      const double S = std::pow(t, 1.5) + std::pow(1.0 - t, 1.5);
      const double N = std::sqrt(t) - std::sqrt(1.0 - t);
      const double dN = 0.5 / std::sqrt(t) + 0.5 / std::sqrt(1.0 - t);
      return (dN * S - 1.5 * N * N) / (S * S);
    };
    in.t_star = 0.0;
  } else if (name == "jump-example") {
    in.A = [](double t) {
      if (t < 0.125) return 1.0 - t;
      if (t < 0.25) return 15.0 / 16.0 - 0.5 * t;
      return 0.75 + (t - 0.5) * (t - 0.5);
    };
    in.d_plus_A = [](double t) {
      if (t < 0.125) return -1.0;
      if (t < 0.25) return -0.5;
      return 2.0 * (t - 0.5);
    };
    in.d2_A = [](double t) { return t < 0.25 ? 0.0 : 2.0; };
    in.declared_jumps = std::vector<double>{0.125};
    in.t_star = 0.125;
    in.smoothness = PickandsSmoothness::Generic;
  } else {
    throw ValidationError("unknown Pickands family '" + name + "'");
  }
  return validate_pickands(in);
}

/// F_A(t) = A(t) + (1-t) D+A(t), with F_A(1) = 1.
inline double cap_function(const PickandsSpec& s, double t) {
  if (t >= 1.0) return 1.0;
  t = std::max(t, 0.0);
  return s.A(t) + (1.0 - t) * s.d_plus_A(t);
}

inline double h_map(double u, double v) {
  const double lu = std::log(u);
  return lu / (lu + std::log(v));
}

/// f_t(u) = u^{(1-t)/t}; h(u, f_t(u)) = t.
inline double contour(double t, double u) { return std::exp(std::log(u) * ((1.0 - t) / t)); }

inline double evc_cdf(const PickandsSpec& s, double u, double v) {
  if (u <= 0.0 || v <= 0.0) return 0.0;
  if (u >= 1.0) return std::min(v, 1.0);
  if (v >= 1.0) return u;
  const double lu = std::log(u), lv = std::log(v);
  return std::exp((lu + lv) * s.A(lu / (lu + lv)));
}

inline double evc_kernel(const PickandsSpec& s, double u, double v) {
  if (v <= 0.0) return 0.0;
  if (v >= 1.0) return 1.0;
  if (u <= 0.0 || u >= 1.0) return 1.0;
  const double lu = std::log(u), lv = std::log(v);
  const double t = lu / (lu + lv);
  return std::clamp(std::exp((lu + lv) * s.A(t) - lu) * cap_function(s, t), 0.0, 1.0);
}

struct EvcEval {
  double u, v, t, a, f, c, k;
};

inline EvcEval evc_evaluate(const PickandsSpec& s, double u, double v) {
  EvcEval e{u, v, h_map(u, v), 0.0, 0.0, 0.0, 0.0};
  e.a = s.A(e.t);
  e.f = cap_function(s, e.t);
  e.c = evc_cdf(s, u, v);
  e.k = evc_kernel(s, u, v);
  return e;
}

/// Jump locations of D+A in (0,1): declared, or detected from persistent difference-quotient gaps.
inline std::vector<double> pickands_jumps(const PickandsSpec& s, bool* numeric = nullptr) {
  if (numeric) *numeric = !s.declared_jumps.has_value();
  if (s.declared_jumps) return *s.declared_jumps;
  std::vector<double> found;
  const auto& D = s.d_plus_A;
  constexpr int n = 1000;
  for (int i = 1; i < n; ++i) {
    const double t = static_cast<double>(i) / n;
    bool persistent = true;
    for (double d : {1e-3, 1e-4, 1e-5}) {
      if (!(D(t + d) - D(t - d) > 1e-3)) persistent = false;
    }
    if (!persistent) continue;
    double lo = t - 1e-3, hi = t + 1e-3;
    const double mid_value = 0.5 * (D(lo) + D(hi));
    for (int it = 0; it < 60; ++it) {
      const double m = 0.5 * (lo + hi);
      (D(m) < mid_value ? lo : hi) = m;
    }
    if (found.empty() || hi - found.back() > 2e-3) found.push_back(hi);
  }
  return found;
}

inline Copula make_evc_copula(const PickandsSpec& s, std::string family, std::vector<Param> params) {
  auto cdf = [s](double u, double v) { return evc_cdf(s, u, v); };
  auto kernel = [s](double u, double v) { return evc_kernel(s, u, v); };
  const auto jumps = pickands_jumps(s);
  auto breaks = [jumps](double v) {
    std::vector<double> b;
    if (!(v > 0.0 && v < 1.0)) return b;
    for (double t : jumps) b.push_back(std::exp(std::log(v) * (t / (1.0 - t))));
    return b;
  };
  Copula c(std::move(family), std::move(params), cdf, kernel, std::nullopt, breaks);
  const double ts = s.t_star;
  if (ts > 0.0) c.set_admissible([ts](double u2, double v1) { return h_map(u2, v1) >= ts - 1e-12; });
  return c;
}

/// Left side of the telescoping identity; equals 1 for every a and rectangle.
inline double cross_ratio_identity_check(double a, const Rectangle& r) {
  const double h11 = h_map(r.u1, r.v1), h12 = h_map(r.u1, r.v2);
  const double h21 = h_map(r.u2, r.v1), h22 = h_map(r.u2, r.v2);
  return std::pow(r.u1, a * (h11 - h12)) * std::pow(r.v1, a * (h11 - h21)) *
         std::pow(r.u2, a * (h22 - h21)) * std::pow(r.v2, a * (h22 - h12));
}

inline Witness evc_rect_witness(const PickandsSpec& s, const Rectangle& r) {
  return detail::rect_witness(r.u1, r.u2, r.v1, r.v2, evc_kernel(s, r.u1, r.v1), evc_kernel(s, r.u1, r.v2),
                              evc_kernel(s, r.u2, r.v1), evc_kernel(s, r.u2, r.v2));
}

struct ContinuousWitnessAux {
  double beta_A = 0.0;
  double alpha = 0.0;
  double g_alpha = 0.0;
  double g_beta_A = 0.0;
  double gamma_alpha = 0.0;
  double best_ratio = 0.0;
};

/// g(alpha) = (1+alpha) A(1/(1+alpha)) - alpha.
inline double pickands_g(const PickandsSpec& s, double alpha) {
  return (1.0 + alpha) * s.A(1.0 / (1.0 + alpha)) - alpha;
}

/// Supremal minimiser of gamma -> A(1/(1+gamma)) over (1e-6, 1e6).
inline double pickands_beta(const PickandsSpec& s) {
  auto f = [&](double x) { return s.A(1.0 / (1.0 + std::exp(x))); };
  const double lo = std::log(1e-6), hi = std::log(1e6);
  constexpr int n = 400;
  int best = 0;
  double fbest = f(lo);
  for (int i = 1; i <= n; ++i) {
    const double fx = f(lo + (hi - lo) * i / n);
    if (fx < fbest) {
      fbest = fx;
      best = i;
    }
  }
  double a = lo + (hi - lo) * std::max(best - 1, 0) / n;
  double b = lo + (hi - lo) * std::min(best + 1, n) / n;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  double x = 0.5 * (a + b);
  const double fmin = std::min(f(x), fbest);
  // Supremum over the (possibly flat) set of minimisers.
  constexpr double flat = 1e-13;
  double step = 1e-3;
  double ok = x;
  double bad = hi;
  for (double y = x + step; y <= hi; y += step) {
    if (f(y) <= fmin + flat) {
      ok = y;
    } else {
      bad = y;
      break;
    }
  }
  for (int it = 0; it < 100; ++it) {
    const double m = 0.5 * (ok + bad);
    (f(m) <= fmin + flat ? ok : bad) = m;
  }
  return std::exp(ok);
}

inline Witness construct_witness_jump(const PickandsSpec& s, double t_l, double t_r, const GridConfig& grid) {
  if (!(t_r > 0.0 && t_r < 1.0 && t_l >= 0.0 && t_l < t_r)) {
    throw PreconditionError("construct_witness_jump: requires 0 <= t_l < t_r < 1");
  }
  const auto jumps = pickands_jumps(s);
  if (jumps.empty()) throw PreconditionError("construct_witness_jump: D+A has no jumps");
  const double y = cap_function(s, t_r - 1e-10);
  const double delta = cap_function(s, t_r) - y;
  if (!(delta > 1e-9)) {
    throw PreconditionError("construct_witness_jump: F_A is continuous at t_r=" + format_number(t_r));
  }
  if (!(cap_function(s, t_l) > 0.0) || !(y > 0.0)) {
    throw PreconditionError("construct_witness_jump: F_A must be positive on [t_l, t_r)");
  }
  const double eps = 0.5 * delta * y / (delta + y);
  const double target = y - eps;
  double t_star = t_l;
  if (cap_function(s, t_l) < target) {
    double lo = t_l, hi = t_r - 1e-10;
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (lo + hi);
      (cap_function(s, m) >= target ? hi : lo) = m;
    }
    t_star = hi;
  }
  std::optional<Witness> best;
  for (double u1 : {0.5, 0.25, 0.75, 0.9}) {
    double v2 = contour(t_r, u1);
    for (int it = 0; it < 64 && h_map(u1, v2) < t_r; ++it) v2 = std::nextafter(v2, 1.0);
    for (int k = 1; k <= 60; ++k) {
      const double sk = std::ldexp(1.0, -k);
      const Rectangle r{u1, u1 + sk * (1.0 - u1), v2 * (1.0 - sk), v2};
      if (!r.valid() || h_map(r.u2, r.v1) < t_star) continue;
      Witness w = evc_rect_witness(s, r);
      if (!w.cross_ratio) continue;
      if (!best || *w.cross_ratio < *best->cross_ratio) best = w;
    }
  }
  if (!best || !(*best->cross_ratio < 1.0 - grid.tol_strict) || !(best->defect > grid.tol_strict)) {
    throw SearchFailed("construct_witness_jump: no violating rectangle (y=" + format_number(y) +
                       ", delta=" + format_number(delta) + ", t*=" + format_number(t_star) + ")");
  }
  return *best;
}

inline Witness construct_witness_gradient(const PickandsSpec& s, const GridConfig& grid,
                                          ContinuousWitnessAux* aux = nullptr) {
  const double d0 = s.d_plus_A(0.0);
  if (!(d0 > -1.0 + 1e-8 && d0 < -1e-8)) {
    throw PreconditionError("construct_witness_gradient: requires D+A(0) in (-1,0), got " + format_number(d0));
  }
  if (s.declared_jumps && !s.declared_jumps->empty()) {
    throw PreconditionError("construct_witness_gradient: D+A must be continuous (use the jump witness)");
  }
  ContinuousWitnessAux x;
  x.beta_A = pickands_beta(s);
  x.alpha = 0.5 * x.beta_A;
  x.g_alpha = pickands_g(s, x.alpha);
  x.g_beta_A = pickands_g(s, x.beta_A);
  const double fb = cap_function(s, 1.0 / (1.0 + x.beta_A));
  const double fa = cap_function(s, 1.0 / (1.0 + x.alpha));
  x.gamma_alpha = std::log(fb / fa) / (x.g_alpha - x.g_beta_A);
  const double u1 = std::exp(0.5 * x.gamma_alpha);
  if (aux) *aux = x;
  if (!(x.gamma_alpha < 0.0) || !std::isfinite(x.gamma_alpha)) {
    throw SearchFailed("construct_witness_gradient: gamma_alpha=" + format_number(x.gamma_alpha) +
                       " is not negative (beta_A=" + format_number(x.beta_A) + ")");
  }
  const double v1 = std::pow(u1, x.beta_A);
  const double v2 = std::pow(u1, x.alpha);
  const double n0 = std::floor(1.0 / (1.0 - u1)) + 1.0;
  std::optional<Witness> best;
  for (int k = 0; k <= 50; ++k) {
    const double n = std::ldexp(n0, k);
    const Rectangle r{u1, 1.0 - 1.0 / n, v1, v2};
    if (!r.valid()) continue;
    Witness w = evc_rect_witness(s, r);
    if (!w.cross_ratio) continue;
    if (!best || *w.cross_ratio < *best->cross_ratio) best = w;
  }
  if (best) {
    x.best_ratio = *best->cross_ratio;
    if (aux) *aux = x;
  }
  if (!best || !(*best->cross_ratio < 1.0 - grid.tol_strict) || !(best->defect > grid.tol_strict)) {
    throw SearchFailed("construct_witness_gradient: budget exhausted (beta_A=" + format_number(x.beta_A) +
                       ", gamma_alpha=" + format_number(x.gamma_alpha) + ", last ratio=" +
                       (best ? format_number(*best->cross_ratio) : std::string("n/a")) + ")");
  }
  return *best;
}

inline Witness construct_witness_constant(const PickandsSpec& s, double t1, double t2, double c,
                                          const GridConfig& grid) {
  const double d0 = s.d_plus_A(0.0);
  if (!(d0 <= -1.0 + 1e-8)) {
    throw PreconditionError("construct_witness_constant: requires D+A(0) = -1, got " + format_number(d0));
  }
  if (!(c > grid.tol_eq && c < 1.0 - grid.tol_eq)) {
    throw PreconditionError("construct_witness_constant: plateau value must lie in (0,1)");
  }
  if (!(0.0 < t1 && t1 < t2 && t2 < 1.0)) {
    throw PreconditionError("construct_witness_constant: requires 0 < t1 < t2 < 1");
  }
  const double ftol = std::max(grid.tol_eq, 1e-12);
  for (int i = 0; i <= 100; ++i) {
    const double t = t1 + (t2 - t1) * i / 100.0;
    if (std::abs(cap_function(s, t) - c) > ftol) {
      throw PreconditionError("construct_witness_constant: F_A is not equal to c on [t1,t2] (t=" +
                              format_number(t) + ", F_A=" + format_number(cap_function(s, t)) + ")");
    }
  }
  // Widen to t2 = sup{F_A <= c}; move t1 inside so that h21 lands on the plateau.
  {
    double lo = t2, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (lo + hi);
      (cap_function(s, m) <= c + ftol ? lo : hi) = m;
    }
    t2 = lo;
  }
  t1 += 1e-3 * (t2 - t1);
  const double a = s.d_plus_A(t1);
  const double b = s.A(t1) - a * t1;
  const double R = ((1.0 - t2) / t2) * ((1.0 - t2) / t2) * (t1 / (1.0 - t1));
  const double s1 = 1.0 / (1.0 + R);
  const double s2 = a < 1.0 ? b / (1.0 - a) : 1.0;
  const double sv = 0.5 * (t2 + std::min({s1, s2, 1.0}));
  if (!(sv > t2 && sv < 1.0)) throw SearchFailed("construct_witness_constant: no admissible s beyond t2");
  const double fs = cap_function(s, sv);
  if (!(fs > c + ftol)) {
    throw SearchFailed("construct_witness_constant: F_A(s) does not exceed c at s=" + format_number(sv));
  }
  const double p = ((1.0 - sv) / sv) * (t2 / (1.0 - t2));
  const double q = ((1.0 - t2) / t2) * (t1 / (1.0 - t1));
  if (!(p > q)) throw SearchFailed("construct_witness_constant: interval condition for u2 is empty");
  const double e = (a * sv + b - s.A(sv)) / sv;
  double u1 = 0.5;
  if (e < -1e-15) {
    const double bound = std::exp(std::log(fs / c) / e);
    u1 = std::max(0.5, std::sqrt(bound));
  }
  const double u2 = std::pow(u1, 0.5 * (p + q));
  const Rectangle r{u1, u2, contour(t1, u2), contour(sv, u1)};
  if (!r.valid()) throw SearchFailed("construct_witness_constant: constructed rectangle is degenerate");
  Witness w = evc_rect_witness(s, r);
  if (!w.cross_ratio || !(*w.cross_ratio < 1.0 - grid.tol_strict) || !(w.defect > grid.tol_strict)) {
    throw SearchFailed("construct_witness_constant: cross-ratio " +
                       (w.cross_ratio ? format_number(*w.cross_ratio) : std::string("undefined")) +
                       " is not below 1 (s=" + format_number(sv) + ", u1=" + format_number(u1) + ")");
  }
  return w;
}

struct Plateau {
  double t1 = 0.0;
  double t2 = 0.0;
  double c = 0.0;
};

/// First interval above t_star of length >= one grid step where F_A is constant with value in (0,1).
inline std::optional<Plateau> find_plateau(const PickandsSpec& s, double tol, int n = 2000) {
  const double lo = s.t_star;
  std::vector<double> ts, fs;
  for (int i = 1; i < n; ++i) {
    ts.push_back(lo + (1.0 - lo) * i / n);
    fs.push_back(cap_function(s, ts.back()));
  }
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    if (std::abs(fs[i + 1] - fs[i]) > tol || !(fs[i] > tol && fs[i] < 1.0 - tol)) continue;
    std::size_t j = i + 1;
    while (j + 1 < ts.size() && std::abs(fs[j + 1] - fs[i]) <= tol) ++j;
    return Plateau{ts[i], ts[j], fs[i]};
  }
  return std::nullopt;
}

struct RatioTest {
  bool non_increasing = true;
  double worst_increase = 0.0;
  double t_worst = 0.0;
  int points = 0;
};

/// r(t) = t(1-t) F_A'(t) / F_A(t) on a 2001-point grid of (t_star+margin, 1-margin).
inline double ratio_r(const PickandsSpec& s, double t) {
  double fp;
  if (s.d2_A) {
    fp = (1.0 - t) * s.d2_A(t);
  } else {
    const double h = 1e-5;
    fp = (cap_function(s, t + h) - cap_function(s, t - h)) / (2.0 * h);
  }
  return t * (1.0 - t) * fp / cap_function(s, t);
}

inline RatioTest ratio_monotonicity_test(const PickandsSpec& s, double margin, double tol_eq) {
  RatioTest out;
  const double lo = s.t_star + margin, hi = 1.0 - margin;
  constexpr int n = 2001;
  out.points = n;
  const double floor_rel = s.d2_A ? 0.0 : 1e-7;
  double prev = ratio_r(s, lo);
  for (int i = 1; i < n; ++i) {
    const double t = lo + (hi - lo) * i / (n - 1);
    const double r = ratio_r(s, t);
    const double inc = r - prev;
    const double allowed = (tol_eq + floor_rel) * (1.0 + std::abs(prev));
    if (inc - allowed > out.worst_increase) {
      out.worst_increase = inc - allowed;
      out.t_worst = t;
    }
    if (inc > allowed) out.non_increasing = false;
    prev = r;
  }
  return out;
}

struct EvcReport {
  Verdict pqd, ltd, si, tp2, mktp2, dtp2;
  std::string branch;
  std::vector<std::string> notes;
  std::optional<ContinuousWitnessAux> aux;
};

inline EvcReport classify_evc(const PickandsSpec& s, const GridConfig& grid) {
  grid.validate();
  EvcReport r;
  r.tp2 = analytic(Status::Holds, "every extreme value copula is TP2");
  r.si = analytic(Status::Holds, "every extreme value copula is SI");
  r.ltd = analytic(Status::Holds, "implied by TP2");
  r.pqd = analytic(Status::Holds, "implied by LTD");
  r.dtp2 = not_applicable("extreme value copulas are handled through their kernel; no density exposed");
  const auto cop = make_evc_copula(s, s.label, {});
  const double d0 = s.d_plus_A(0.0);
  bool numeric_jumps = false;
  const auto jumps = pickands_jumps(s, &numeric_jumps);

  auto with_fallback = [&](const std::string& why, auto&& construct) {
    try {
      Witness w = construct();
      return analytic(Status::Fails, why, w);
    } catch (const std::exception& e) {
      r.notes.push_back(std::string("witness construction: ") + e.what());
    }
    Verdict g = check_mktp2(cop, grid);
    if (g.fails()) {
      g.note = why + "; witness from grid search";
      return g;
    }
    g.status = Status::Inconclusive;
    g.note = why + "; no witness rectangle found";
    return g;
  };
  auto downgrade = [&](Verdict v) {
    if (numeric_jumps && v.method == Method::Analytic && v.fails() && !v.witness) v.status = Status::Inconclusive;
    return v;
  };

  if (std::abs(d0) <= 1e-8) {
    r.branch = "1";
    r.mktp2 = analytic(Status::Holds, "D+A(0) = 0, so A = 1 and C = Pi");
    return r;
  }
  if (d0 > -1.0 + 1e-8) {
    r.branch = "2";
    const std::string why = "D+A(0) in (-1,0)";
    if (!jumps.empty()) {
      const double tr = jumps.front();
      r.mktp2 = downgrade(with_fallback(why + ", jump of F_A at t=" + format_number(tr),
                                        [&] { return construct_witness_jump(s, 0.5 * tr, tr, grid); }));
    } else {
      ContinuousWitnessAux aux;
      r.mktp2 = with_fallback(why + ", continuous D+A", [&] {
        auto w = construct_witness_gradient(s, grid, &aux);
        return w;
      });
      r.aux = aux;
    }
    return r;
  }

  // D+A(0) = -1.
  if (jumps.size() >= 2) {
    r.branch = "3a";
    const double tl = jumps[0], tr = jumps[1];
    r.mktp2 = downgrade(with_fallback("D+A has at least two jumps",
                                      [&] { return construct_witness_jump(s, tl + 0.5 * (tr - tl), tr, grid); }));
    return r;
  }
  if (jumps.size() == 1 && jumps.front() > s.t_star + 1e-9) {
    r.branch = "3b";
    const double tr = jumps.front();
    double lo = 0.0, hi = tr;
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (lo + hi);
      (cap_function(s, m) > 0.0 ? hi : lo) = m;
    }
    const double tl = 0.5 * (hi + tr);
    r.mktp2 = downgrade(with_fallback("single jump with A != 1-t before it",
                                      [&] { return construct_witness_jump(s, tl, tr, grid); }));
    return r;
  }
  if (auto pl = find_plateau(s, std::max(grid.tol_eq, 1e-12))) {
    r.branch = "3c";
    r.mktp2 = with_fallback("F_A is constant " + format_number(pl->c) + " on [" + format_number(pl->t1) + ", " +
                                format_number(pl->t2) + "]",
                            [&] { return construct_witness_constant(s, pl->t1, pl->t2, pl->c, grid); });
    return r;
  }
  r.notes.push_back(
      "log-concavity of F_A is necessary on [t*,1/2] and sufficient only on [1/2,1); the gap is not resolved");
  if (s.smoothness == PickandsSmoothness::C3AboveTStar) {
    const auto rt = ratio_monotonicity_test(s, grid.margin, grid.tol_eq);
    if (rt.non_increasing) {
      r.branch = "3d";
      r.mktp2 = analytic(Status::Holds, "r(t) = t(1-t)F_A'/F_A non-increasing on (t*+margin, 1-margin)");
      r.mktp2.certificate.points = rt.points;
      r.mktp2.certificate.margin = grid.margin;
      r.mktp2.certificate.tol_eq = grid.tol_eq;
      return r;
    }
    r.notes.push_back("r(t) increases near t=" + format_number(rt.t_worst));
  }
  r.branch = "3e";
  Verdict g = check_mktp2(cop, grid);
  if (!g.fails()) {
    g.status = Status::Inconclusive;
    g.note = "no violating rectangle on the grid; sufficiency criterion not met (necessity open)";
  }
  r.mktp2 = g;
  return r;
}

}  // namespace copdep

#endif  // COPDEP_EXTREME_VALUE_HPP
