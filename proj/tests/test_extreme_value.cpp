#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "copdep/copdep.hpp"
#include "oracles.hpp"

using namespace copdep;

namespace {

PickandsSpec pi_spec() {
  PickandsInput in;
  in.A = [](double) { return 1.0; };
  in.d_plus_A = [](double) { return 0.0; };
  in.declared_jumps = std::vector<double>{};
  return validate_pickands(in);
}

// Independent kernel: u-derivative of the cdf by central differences.
double fd_kernel(const PickandsSpec& s, double u, double v) {
  return oracle::central_difference([&](double x) { return evc_cdf(s, x, v); }, u, 1e-6);
}

// Convex A equal to 1 - t on [0, 0.2] and linear with slope 0.2 on [0.3, 0.4], where F_A = 0.9.
PickandsSpec synthetic_plateau() {
  // A(t) = 1 - t for t <= t0; then a convex quadratic q joining slope -1 to slope a at t1;
  // linear a t + b on [t1, t2]; then a convex quadratic to (1, 1) with slope at most 1.
  const double t0 = 0.2, t1 = 0.3, t2 = 0.4, a = 0.2;
  // Quadratic on [t0, t1]: A = 1 - t + k (t - t0)^2 with slope -1 + 2k (t1 - t0) = a.
  const double k = (a + 1.0) / (2.0 * (t1 - t0));
  const double A1 = 1.0 - t1 + k * (t1 - t0) * (t1 - t0);
  const double b = A1 - a * t1;
  const double A2 = a * t2 + b;
  // Quadratic on [t2, 1]: A = A2 + a (t - t2) + m (t - t2)^2 with A(1) = 1.
  const double m = (1.0 - A2 - a * (1.0 - t2)) / ((1.0 - t2) * (1.0 - t2));
  PickandsInput in;
  in.A = [=](double t) {
    if (t <= t0) return 1.0 - t;
    if (t <= t1) return 1.0 - t + k * (t - t0) * (t - t0);
    if (t <= t2) return a * t + b;
    return A2 + a * (t - t2) + m * (t - t2) * (t - t2);
  };
  in.d_plus_A = [=](double t) {
    if (t < t0) return -1.0;
    if (t < t1) return -1.0 + 2.0 * k * (t - t0);
    if (t < t2) return a;
    return a + 2.0 * m * (t - t2);
  };
  in.declared_jumps = std::vector<double>{};
  in.t_star = t0;
  in.label = "synthetic";
  return validate_pickands(in);
}

}  // namespace

TEST(Pickands, Validation) {
  const auto pi = pi_spec();
  EXPECT_EQ(pi.t_star, 0.0);
  EXPECT_EQ(pi.d_plus_A(0.3), 0.0);

  PickandsInput m;
  m.A = [](double t) { return std::max(1.0 - t, t); };
  const auto ms = validate_pickands(m);
  EXPECT_NEAR(ms.t_star, 0.5, 1e-6);

  PickandsInput bad;
  bad.A = [](double t) { return 1.5 * t * t - 1.5 * t + 1.0; };
  try {
    validate_pickands(bad);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("slope"), std::string::npos);
  }
  PickandsInput low;
  low.A = [](double t) { return 1.0 - 0.9 * t * (1.0 - t) * 4.0; };
  EXPECT_THROW(validate_pickands(low), ValidationError);
}

TEST(Pickands, ParameterConstraints) {
  EXPECT_THROW(builtin_pickands("gumbel", {{"alpha", 0.9}}), ValidationError);
  EXPECT_THROW(builtin_pickands("marshall-olkin", {{"alpha", 1.2}, {"beta", 0.5}}), ValidationError);
  EXPECT_THROW(builtin_pickands("tawn-symmetric", {{"theta", 1.5}}), ValidationError);
  EXPECT_THROW(builtin_pickands("tawn-asym-mixed", {{"theta", 0.5}, {"kappa", 0.6}}), ValidationError);
  EXPECT_THROW(builtin_pickands("tawn-asym-mixed", {{"theta", 0.2}, {"kappa", -0.1}}), ValidationError);
  EXPECT_NO_THROW(builtin_pickands("tawn-asym-mixed", {{"theta", 1.25}, {"kappa", -0.25}}));
  EXPECT_THROW(builtin_pickands("husler-reiss"), ValidationError);
}

TEST(Pickands, BuiltinMetadata) {
  const auto mo = builtin_pickands("marshall-olkin", {{"alpha", 0.7}, {"beta", 1.0}});
  EXPECT_NEAR(mo.t_star, 0.7 / 1.7, 1e-15);
  ASSERT_TRUE(mo.declared_jumps);
  ASSERT_EQ(mo.declared_jumps->size(), 1u);
  EXPECT_NEAR(mo.declared_jumps->front(), 0.7 / 1.7, 1e-15);
  const auto jx = builtin_pickands("jump-example");
  EXPECT_EQ(jx.t_star, 0.125);
  EXPECT_EQ(jx.declared_jumps->front(), 0.125);
}

TEST(CapFunction, Values) {
  const auto m = builtin_pickands("marshall-olkin", {{"alpha", 1.0}, {"beta", 1.0}});
  EXPECT_NEAR(cap_function(m, 0.2), 0.0, 1e-15);
  EXPECT_NEAR(cap_function(m, 0.6), 1.0, 1e-15);
  const auto t1 = builtin_pickands("tawn-symmetric", {{"theta", 1.0}});
  EXPECT_NEAR(cap_function(t1, 0.5), 0.75, 1e-15);
  for (double t : {0.1, 0.4, 0.8}) EXPECT_NEAR(cap_function(t1, t), t * (2.0 - t), 1e-14);
  EXPECT_NEAR(cap_function(builtin_pickands("jump-example"), 0.2), 7.0 / 16.0, 1e-15);
  for (double t : {0.0, 0.3, 1.0}) EXPECT_EQ(cap_function(pi_spec(), t), 1.0);
  EXPECT_NEAR(cap_function(builtin_pickands("gumbel", {{"alpha", 2.0}}), 0.5), std::sqrt(0.5), 1e-15);
  const auto lg = builtin_pickands("log-example");
  EXPECT_NEAR(cap_function(lg, 0.5), (2.0 / 3.0) * std::log(std::pow(2.0, -0.5)) + 1.0, 1e-14);
  EXPECT_NEAR(cap_function(lg, 0.5), 0.768951, 1e-6);
  const double fd = lg.A(0.5) + 0.5 * oracle::central_difference(lg.A, 0.5, 1e-6);
  EXPECT_NEAR(cap_function(lg, 0.5), fd, 1e-8);
}

TEST(CapFunction, NonDecreasingNonNegative) {
  const std::vector<PickandsSpec> specs{builtin_pickands("gumbel", {{"alpha", 2.0}}),
                                        builtin_pickands("marshall-olkin", {{"alpha", 0.5}, {"beta", 0.5}}),
                                        builtin_pickands("tawn-symmetric", {{"theta", 0.2}}),
                                        builtin_pickands("tawn-asym-mixed", {{"theta", 1.25}, {"kappa", -0.25}}),
                                        builtin_pickands("log-example"), builtin_pickands("jump-example")};
  for (const auto& s : specs) {
    double prev = 0.0;
    for (int i = 0; i <= 2000; ++i) {
      const double f = cap_function(s, i / 2000.0);
      EXPECT_GE(f, -1e-15) << s.label;
      EXPECT_GE(f, prev - 1e-12) << s.label << " t=" << i / 2000.0;
      prev = f;
    }
  }
}

TEST(ClosedFormSecondDerivative, MatchesDifferences) {
  for (const auto& s : {builtin_pickands("gumbel", {{"alpha", 2.5}}), builtin_pickands("log-example"),
                        builtin_pickands("tawn-asym-mixed", {{"theta", 0.5}, {"kappa", 0.1}})}) {
    for (double t : {0.1, 0.33, 0.5, 0.8}) {
      EXPECT_NEAR(s.d2_A(t), oracle::central_difference(s.d_plus_A, t, 1e-6), 1e-6) << s.label << ' ' << t;
    }
  }
}

TEST(EvcFunctions, Values) {
  const auto pi = pi_spec();
  EXPECT_NEAR(evc_kernel(pi, 0.4, 0.7), 0.7, 1e-15);
  const auto m = builtin_pickands("marshall-olkin", {{"alpha", 1.0}, {"beta", 1.0}});
  EXPECT_NEAR(evc_cdf(m, 0.3, 0.5), 0.3, 1e-15);
  const auto g = builtin_pickands("gumbel", {{"alpha", 2.0}});
  EXPECT_NEAR(evc_kernel(g, 0.5, 0.5), std::pow(0.25, std::sqrt(0.5)) / 0.5 * std::sqrt(0.5), 1e-14);
  EXPECT_NEAR(evc_kernel(g, 0.5, 0.5), 0.530633, 1e-6);
  EXPECT_EQ(evc_kernel(g, 0.0, 0.3), 1.0);
  EXPECT_EQ(evc_kernel(g, 0.3, 1.0), 1.0);
  EXPECT_EQ(evc_kernel(g, 0.3, 0.0), 0.0);
}

TEST(EvcFunctions, HMapAndContour) {
  EXPECT_DOUBLE_EQ(h_map(0.5, 0.5), 0.5);
  EXPECT_NEAR(h_map(0.25, 0.5), 2.0 / 3.0, 1e-15);
  for (double u : {0.1, 0.5, 0.93}) EXPECT_NEAR(contour(0.5, u), u, 1e-15);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.01, 0.99);
  for (int i = 0; i < 1000; ++i) {
    const double t = U(rng), u = U(rng);
    const double v = contour(t, u);
    if (v <= 0.0 || v >= 1.0) continue;
    EXPECT_NEAR(h_map(u, v), t, 1e-12);
  }
  EXPECT_GT(h_map(0.3, 0.6), h_map(0.4, 0.6));
  EXPECT_LT(h_map(0.3, 0.6), h_map(0.3, 0.7));
}

TEST(EvcFunctions, GumbelMatchesArchimedean) {
  for (double alpha : {1.5, 3.0}) {
    const auto e = builtin_pickands("gumbel", {{"alpha", alpha}});
    const auto a = builtin_archimedean("gumbel", {{"alpha", alpha}});
    double worst = 0.0;
    for (int i = 0; i < 101; ++i) {
      for (int j = 0; j < 101; ++j) {
        const double u = 0.005 + 0.99 * i / 100.0, v = 0.005 + 0.99 * j / 100.0;
        worst = std::max(worst, std::abs(evc_kernel(e, u, v) - arch_kernel(a, u, v)));
      }
    }
    EXPECT_LE(worst, 1e-10) << alpha;
  }
}

TEST(EvcFunctions, KernelMatchesCdfDerivative) {
  const std::vector<PickandsSpec> specs{builtin_pickands("gumbel", {{"alpha", 2.0}}),
                                        builtin_pickands("marshall-olkin", {{"alpha", 0.5}, {"beta", 0.5}}),
                                        builtin_pickands("marshall-olkin", {{"alpha", 0.7}, {"beta", 1.0}}),
                                        builtin_pickands("tawn-symmetric", {{"theta", 0.2}}),
                                        builtin_pickands("tawn-asym-mixed", {{"theta", 1.25}, {"kappa", -0.25}}),
                                        builtin_pickands("log-example"), builtin_pickands("jump-example")};
  for (const auto& s : specs) {
    const auto jumps = pickands_jumps(s);
    double worst = 0.0;
    for (int i = 0; i < 101; ++i) {
      for (int j = 0; j < 101; ++j) {
        const double u = 0.01 + 0.98 * i / 100.0, v = 0.01 + 0.98 * j / 100.0;
        bool near = false;
        for (double tj : jumps) near |= std::abs(u - std::pow(v, tj / (1.0 - tj))) < 1e-4;
        if (near) continue;
        worst = std::max(worst, std::abs(evc_kernel(s, u, v) - fd_kernel(s, u, v)));
      }
    }
    EXPECT_LE(worst, 1e-5) << s.label;
  }
}

TEST(EvcFunctions, EveryBuiltinIsSiAndTp2) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const std::vector<PickandsSpec> specs{builtin_pickands("gumbel", {{"alpha", 2.0}}),
                                        builtin_pickands("marshall-olkin", {{"alpha", 0.5}, {"beta", 0.5}}),
                                        builtin_pickands("tawn-symmetric", {{"theta", 0.2}}),
                                        builtin_pickands("log-example"), builtin_pickands("jump-example")};
  for (const auto& s : specs) {
    for (double v : {0.1, 0.5, 0.9}) {
      double prev = 1.0;
      for (int i = 1; i < 500; ++i) {
        const double k = evc_kernel(s, i / 500.0, v);
        EXPECT_LE(k, prev + 1e-12) << s.label;
        prev = k;
      }
    }
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
      double u1 = U(rng), u2 = U(rng), v1 = U(rng), v2 = U(rng);
      if (u1 > u2) std::swap(u1, u2);
      if (v1 > v2) std::swap(v1, v2);
      const double det = evc_cdf(s, u1, v1) * evc_cdf(s, u2, v2) - evc_cdf(s, u1, v2) * evc_cdf(s, u2, v1);
      worst = std::min(worst, det);
    }
    EXPECT_GE(worst, -1e-12) << s.label;
  }
}

TEST(EvcFunctions, Disintegration) {
  const std::vector<PickandsSpec> specs{builtin_pickands("gumbel", {{"alpha", 2.0}}),
                                        builtin_pickands("marshall-olkin", {{"alpha", 0.5}, {"beta", 0.5}}),
                                        builtin_pickands("marshall-olkin", {{"alpha", 1.0}, {"beta", 1.0}}),
                                        builtin_pickands("log-example"), builtin_pickands("jump-example")};
  for (const auto& s : specs) {
    const auto c = make_evc_copula(s, s.label, {});
    for (int k = 1; k <= 9; ++k) EXPECT_NEAR(disintegrate(c, k / 10.0), k / 10.0, 1e-6) << s.label << ' ' << k;
  }
}

TEST(ClassifyEvc, DecisionTree) {
  const GridConfig g;
  struct Case {
    PickandsSpec spec;
    std::string branch;
    Status status;
  };
  const std::vector<Case> cases{
      {pi_spec(), "1", Status::Holds},
      {builtin_pickands("tawn-symmetric", {{"theta", 0.2}}), "2", Status::Fails},
      {builtin_pickands("tawn-symmetric", {{"theta", 1.0}}), "3d", Status::Holds},
      {builtin_pickands("marshall-olkin", {{"alpha", 0.7}, {"beta", 1.0}}), "3d", Status::Holds},
      {builtin_pickands("marshall-olkin", {{"alpha", 0.5}, {"beta", 0.5}}), "2", Status::Fails},
      {builtin_pickands("jump-example"), "3c", Status::Fails},
  };
  for (const auto& c : cases) {
    const auto r = classify_evc(c.spec, g);
    EXPECT_EQ(r.branch, c.branch) << c.spec.label;
    EXPECT_EQ(r.mktp2.status, c.status) << c.spec.label;
    EXPECT_TRUE(r.tp2.holds());
    EXPECT_TRUE(r.si.holds());
    EXPECT_EQ(r.dtp2.status, Status::NotApplicable);
  }
}

TEST(ClassifyEvc, LogExample) {
  const auto s = builtin_pickands("log-example");
  EXPECT_NEAR(ratio_r(s, 0.1), 0.474, 1e-3);
  EXPECT_NEAR(ratio_r(s, 0.2), 0.505, 1e-3);
  // Frozen from the independent difference-quotient evaluation of r.
  auto r_fd = [&](double t) {
    const double fp = oracle::central_difference([&](double x) { return cap_function(s, x); }, t, 1e-5);
    return t * (1.0 - t) * fp / cap_function(s, t);
  };
  EXPECT_NEAR(ratio_r(s, 0.1), r_fd(0.1), 1e-7);
  EXPECT_NEAR(ratio_r(s, 0.2), r_fd(0.2), 1e-7);
  const auto r = classify_evc(s, GridConfig{});
  EXPECT_EQ(r.branch, "3e");
  ASSERT_TRUE(r.mktp2.fails());
  ASSERT_TRUE(r.mktp2.witness);
  const auto& w = r.mktp2.witness->rect;
  EXPECT_GE(w.u1, 0.85);
  EXPECT_LT(*r.mktp2.witness->cross_ratio, 1.0);
  bool noted = false;
  for (const auto& n : r.notes) noted |= n.find("log-concavity") != std::string::npos;
  EXPECT_TRUE(noted);
}

TEST(ClassifyEvc, LogExampleLocalRectangle) {
  const auto s = builtin_pickands("log-example");
  const auto c = make_evc_copula(s, "log-example", {});
  GridConfig g;
  g.n_u = g.n_v = 200;
  g.region = Region{0.9, 0.95, 0.5, 0.6};
  const auto v = check_mktp2(c, g);
  EXPECT_TRUE(v.fails());
  ASSERT_TRUE(v.witness);
  EXPECT_GE(v.witness->rect.u1, 0.9);
  EXPECT_LE(v.witness->rect.u2, 0.95);
  EXPECT_GE(v.witness->rect.v1, 0.5);
  EXPECT_LE(v.witness->rect.v2, 0.6);
  // The rectangle itself, at its corners.
  const auto e = evaluate_witness(c, Property::Mktp2, {0.9, 0.95, 0.5, 0.6}, GridConfig{});
  EXPECT_LT(*e.witness->cross_ratio, 1.0);
}

TEST(ClassifyEvc, LogConcavityOfLogExampleCap) {
  const auto s = builtin_pickands("log-example");
  std::vector<double> ts;
  for (int i = 0; i <= 900; ++i) ts.push_back(0.05 + 0.9 * i / 900.0);
  EXPECT_TRUE(log_concavity_test([&](double t) { return cap_function(s, t); }, ts, 1e-12, 1e-9).holds());
}

TEST(ClassifyEvc, UnknownJumpsAreDetected) {
  const auto mo = builtin_pickands("marshall-olkin", {{"alpha", 0.5}, {"beta", 0.5}});
  PickandsInput in;
  in.A = mo.A;
  in.d_plus_A = mo.d_plus_A;
  const auto s = validate_pickands(in);
  EXPECT_FALSE(s.declared_jumps.has_value());
  bool numeric = false;
  const auto j = pickands_jumps(s, &numeric);
  EXPECT_TRUE(numeric);
  ASSERT_EQ(j.size(), 1u);
  EXPECT_NEAR(j.front(), 0.5, 1e-9);
  const auto r = classify_evc(s, GridConfig{});
  EXPECT_TRUE(r.mktp2.fails());
  EXPECT_TRUE(r.mktp2.witness);
}

TEST(Witness, Jump) {
  const GridConfig g;
  const auto mo = builtin_pickands("marshall-olkin", {{"alpha", 0.5}, {"beta", 0.5}});
  EXPECT_NEAR(cap_function(mo, 0.5 - 1e-12), 0.5, 1e-12);
  const auto w = construct_witness_jump(mo, 0.25, 0.5, g);
  const auto& r = w.rect;
  const double ratio = evc_kernel(mo, r.u1, r.v1) * evc_kernel(mo, r.u2, r.v2) /
                       (evc_kernel(mo, r.u1, r.v2) * evc_kernel(mo, r.u2, r.v1));
  EXPECT_LT(ratio, 1.0 - 1e-6);
  EXPECT_NEAR(ratio, *w.cross_ratio, 1e-12);
  EXPECT_THROW(construct_witness_jump(builtin_pickands("tawn-symmetric", {{"theta", 0.5}}), 0.2, 0.5, g),
               PreconditionError);
  // F_A vanishes before the jump of the jump-example.
  EXPECT_THROW(construct_witness_jump(builtin_pickands("jump-example"), 0.05, 0.125, g), PreconditionError);
}

TEST(Witness, Gradient) {
  const GridConfig g;
  const auto s = builtin_pickands("tawn-symmetric", {{"theta", 0.2}});
  ContinuousWitnessAux aux;
  const auto w = construct_witness_gradient(s, g, &aux);
  EXPECT_NEAR(aux.beta_A, 1.0, 1e-5);
  EXPECT_NEAR(aux.alpha, 0.5, 1e-5);
  // F_A(t) = 1 - theta t^2 for this family, so F_A(1/2) = 1 - theta/4 and F_A(2/3) = 1 - theta/9.
  const double theta = 0.2;
  const double gamma = std::log((1.0 - theta / 4.0) / (1.0 - theta / 9.0)) / (theta / 6.0);
  EXPECT_NEAR(aux.gamma_alpha, gamma, 1e-5);
  EXPECT_NEAR(aux.gamma_alpha, -0.8647, 1e-4);
  EXPECT_NEAR(w.rect.u1, 0.6490, 1e-4);
  const auto& r = w.rect;
  const double ratio = evc_kernel(s, r.u1, r.v1) * evc_kernel(s, r.u2, r.v2) /
                       (evc_kernel(s, r.u1, r.v2) * evc_kernel(s, r.u2, r.v1));
  EXPECT_LT(ratio, 1.0 - 1e-6);
  EXPECT_NO_THROW(construct_witness_gradient(builtin_pickands("tawn-symmetric", {{"theta", 0.5}}), g));
  EXPECT_THROW(construct_witness_gradient(pi_spec(), g), PreconditionError);
}

TEST(Witness, Constant) {
  const GridConfig g;
  const auto jx = builtin_pickands("jump-example");
  const auto w = construct_witness_constant(jx, 0.125, 0.25, 7.0 / 16.0, g);
  const auto& r = w.rect;
  const double ratio = evc_kernel(jx, r.u1, r.v1) * evc_kernel(jx, r.u2, r.v2) /
                       (evc_kernel(jx, r.u1, r.v2) * evc_kernel(jx, r.u2, r.v1));
  EXPECT_LT(ratio, 1.0 - 1e-6);
  EXPECT_NEAR(h_map(r.u1, r.v2), 0.34375, 2e-3);
  EXPECT_THROW(construct_witness_constant(builtin_pickands("marshall-olkin", {{"alpha", 0.5}, {"beta", 0.5}}), 0.1,
                                          0.4, 0.5, g),
               PreconditionError);
  const auto syn = synthetic_plateau();
  EXPECT_NEAR(cap_function(syn, 0.35), 0.9, 1e-12);
  EXPECT_NEAR(cap_function(syn, 0.3), 0.9, 1e-12);
  const auto ws = construct_witness_constant(syn, 0.3, 0.4, cap_function(syn, 0.35), g);
  const auto& q = ws.rect;
  const double rs = evc_kernel(syn, q.u1, q.v1) * evc_kernel(syn, q.u2, q.v2) /
                    (evc_kernel(syn, q.u1, q.v2) * evc_kernel(syn, q.u2, q.v1));
  EXPECT_LT(rs, 1.0 - 1e-6);
}

TEST(CrossRatioIdentity, Values) {
  EXPECT_NEAR(cross_ratio_identity_check(1.0, {0.3, 0.6, 0.4, 0.7}), 1.0, 1e-12);
  EXPECT_EQ(cross_ratio_identity_check(0.0, {0.2, 0.4, 0.3, 0.9}), 1.0);
  EXPECT_NEAR(cross_ratio_identity_check(-2.5, {0.1, 0.2, 0.8, 0.9}), 1.0, 1e-12);
}
