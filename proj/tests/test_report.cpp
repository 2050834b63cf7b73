#include <gtest/gtest.h>

#include "copdep/copdep.hpp"

using namespace copdep;

namespace {

const Entry& entry(const Report& r, Property p) {
  for (const auto& e : r.entries) {
    if (e.property == p) return e;
  }
  throw std::runtime_error("missing entry");
}

}  // namespace

TEST(Params, Parsing) {
  const auto p = parse_params("alpha=0.5,beta=1");
  EXPECT_EQ(p.at("alpha"), 0.5);
  EXPECT_EQ(p.at("beta"), 1.0);
  EXPECT_TRUE(parse_params("").empty());
  EXPECT_EQ(parse_params("kappa=-0.25").at("kappa"), -0.25);
  EXPECT_THROW(parse_params("alpha"), ValidationError);
  EXPECT_THROW(parse_params("alpha=0,5"), ValidationError);
  EXPECT_THROW(parse_params("alpha=1,alpha=2"), ValidationError);
  EXPECT_THROW(parse_params("alpha=nan"), ValidationError);
  EXPECT_THROW(parse_params("alpha=1x"), ValidationError);
}

TEST(Registry, Errors) {
  EXPECT_THROW(make_family("clayton", {}), ValidationError);
  EXPECT_THROW(make_family("gumbel", {}), ValidationError);
  EXPECT_THROW(make_family("gumbel", {{"alpha", 2.0}, {"beta", 1.0}}), ValidationError);
  EXPECT_THROW(make_family("frechet", {{"alpha", 0.8}, {"beta", 0.5}}), ValidationError);
  EXPECT_THROW(make_family("mo", {{"alpha", 1.5}, {"beta", 0.5}}), ValidationError);
}

TEST(Registry, EveryFamilyBuilds) {
  const std::map<std::string, std::map<std::string, double>> params{
      {"frechet", {{"alpha", 0.3}, {"beta", 0.1}}}, {"fgm", {{"theta", 0.4}}},
      {"gaussian", {{"rho", 0.5}}},                 {"gumbel", {{"alpha", 2.0}}},
      {"evc-gumbel", {{"alpha", 2.0}}},             {"mo", {{"alpha", 0.5}, {"beta", 0.5}}},
      {"tawn-sym", {{"theta", 0.5}}},               {"tawn-mix", {{"theta", 0.5}, {"kappa", 0.2}}}};
  for (const auto& info : family_table()) {
    auto it = params.find(info.name);
    const auto f = make_family(info.name, it == params.end() ? std::map<std::string, double>{} : it->second);
    EXPECT_EQ(f.kind, info.kind);
    EXPECT_NEAR(f.copula.cdf(0.4, 1.0), 0.4, 1e-12) << info.name;
  }
}

TEST(Classify, MarshallOlkinBetaOne) {
  const auto r = classify_report(make_family("mo", {{"alpha", 0.5}, {"beta", 1.0}}), GridConfig{});
  const auto& e = entry(r, Property::Mktp2);
  EXPECT_EQ(e.verdict.status, Status::Holds);
  EXPECT_EQ(e.verdict.method, Method::Analytic);
  EXPECT_EQ(r.route, FamilyKind::ExtremeValue);
  ASSERT_TRUE(r.branch);
}

TEST(Classify, TawnMixed) {
  const auto r = classify_report(make_family("tawn-mix", {{"theta", 1.25}, {"kappa", -0.25}}), GridConfig{});
  EXPECT_TRUE(entry(r, Property::Mktp2).verdict.holds());
}

TEST(Classify, FrechetFailsPqd) {
  const auto r = classify_report(make_family("frechet", {{"alpha", 0.3}, {"beta", 0.1}}), GridConfig{});
  EXPECT_TRUE(entry(r, Property::Pqd).verdict.fails());
  EXPECT_EQ(entry(r, Property::Pqd).verdict.method, Method::Grid);
  EXPECT_EQ(r.entries.size(), 6u);
}

TEST(Classify, GumbelIsAnalytic) {
  const auto r = check_report(make_family("gumbel", {{"alpha", 2.0}}), Property::Mktp2, GridConfig{});
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_TRUE(r.entries[0].verdict.holds());
  EXPECT_EQ(r.entries[0].verdict.method, Method::Analytic);
  EXPECT_EQ(r.entries[0].verdict.certificate.tol_strict, 1e-9);
}

TEST(Json, Fields) {
  const auto r = classify_report(make_family("fgm", {{"theta", -0.5}}), GridConfig{});
  const auto j = to_json(r);
  EXPECT_EQ(j["tool"], "copdep");
  EXPECT_EQ(j["version"], kToolVersion);
  EXPECT_EQ(j["family"], "fgm");
  EXPECT_EQ(j["params"]["theta"], -0.5);
  EXPECT_EQ(j["route"], "grid");
  EXPECT_EQ(j["entries"].size(), 6u);
  EXPECT_FALSE(j.contains("timing"));
  for (const auto& e : j["entries"]) {
    EXPECT_TRUE(e.contains("certificate"));
    if (e["status"] == "Fails") {
      EXPECT_TRUE(e.contains("witness"));
    }
  }
  const auto m = to_json(classify_report(make_family("m", {}), GridConfig{}));
  EXPECT_TRUE(m["entries"][5]["worst_defect"].is_null());
}

TEST(RoundTrip, WitnessesReproduceThroughRect) {
  const std::vector<std::pair<std::string, std::map<std::string, double>>> fams{
      {"frechet", {{"alpha", 0.3}, {"beta", 0.1}}},
      {"fgm", {{"theta", -0.5}}},
      {"w", {}},
      {"spreeuw", {}},
      {"mo", {{"alpha", 0.5}, {"beta", 0.5}}},
      {"tawn-sym", {{"theta", 0.2}}},
      {"evc-log", {}},
      {"evc-jump", {}}};
  const GridConfig g;
  for (const auto& [name, params] : fams) {
    const auto f = make_family(name, params);
    const auto r = classify_report(f, g);
    for (const auto& e : r.entries) {
      if (!e.verdict.fails() || !e.verdict.witness) continue;
      const auto& w = *e.verdict.witness;
      ASSERT_NE(w.kind, WitnessKind::Triple) << name;
      ASSERT_NE(w.kind, WitnessKind::Jump) << name;
      const auto back = rect_report(f, e.property, w.rect, g);
      const auto& v = back.entries.front().verdict;
      EXPECT_EQ(v.status, Status::Fails) << name << ' ' << to_string(e.property);
      EXPECT_NEAR(v.witness->defect, w.defect, 1e-12) << name << ' ' << to_string(e.property);
    }
  }
}

TEST(Witness, NothingToConstruct) {
  EXPECT_THROW(witness_report(make_family("gumbel", {{"alpha", 2.0}}), Property::Mktp2, GridConfig{}),
               NothingToConstruct);
  EXPECT_THROW(witness_report(make_family("m", {}), Property::Dtp2, GridConfig{}), NothingToConstruct);
}

TEST(Witness, Constructions) {
  const GridConfig g;
  EXPECT_EQ(*witness_report(make_family("tawn-sym", {{"theta", 0.2}}), Property::Mktp2, g).construction,
            "gradient");
  EXPECT_EQ(*witness_report(make_family("mo", {{"alpha", 0.5}, {"beta", 0.5}}), Property::Mktp2, g).construction,
            "jump");
  EXPECT_EQ(*witness_report(make_family("evc-jump", {}), Property::Mktp2, g).construction, "constant");
  const auto r = witness_report(make_family("evc-log", {}), Property::Mktp2, g);
  EXPECT_EQ(*r.construction, "search");
  const auto& w = r.entries.front().verdict.witness;
  ASSERT_TRUE(w);
  EXPECT_GE(w->rect.u1, 0.85);
  EXPECT_LT(*w->cross_ratio, 1.0);
}
