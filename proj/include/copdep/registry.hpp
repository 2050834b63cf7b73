#ifndef COPDEP_REGISTRY_HPP
#define COPDEP_REGISTRY_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "copdep/archimedean.hpp"
#include "copdep/core.hpp"
#include "copdep/errors.hpp"
#include "copdep/extreme_value.hpp"

namespace copdep {

enum class FamilyKind { Closed, Archimedean, ExtremeValue };

inline const char* to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::Closed: return "grid";
    case FamilyKind::Archimedean: return "archimedean";
    case FamilyKind::ExtremeValue: return "extreme-value";
  }
  return "?";
}

struct FamilyInfo {
  std::string name;
  FamilyKind kind;
  std::vector<std::string> keys;
};

inline const std::vector<FamilyInfo>& family_table() {
  static const std::vector<FamilyInfo> t = {
      {"pi", FamilyKind::Archimedean, {}},
      {"m", FamilyKind::Closed, {}},
      {"w", FamilyKind::Archimedean, {}},
      {"frechet", FamilyKind::Closed, {"alpha", "beta"}},
      {"fgm", FamilyKind::Closed, {"theta"}},
      {"gaussian", FamilyKind::Closed, {"rho"}},
      {"gumbel", FamilyKind::Archimedean, {"alpha"}},
      {"spreeuw", FamilyKind::Archimedean, {}},
      {"evc-gumbel", FamilyKind::ExtremeValue, {"alpha"}},
      {"mo", FamilyKind::ExtremeValue, {"alpha", "beta"}},
      {"tawn-sym", FamilyKind::ExtremeValue, {"theta"}},
      {"tawn-mix", FamilyKind::ExtremeValue, {"theta", "kappa"}},
      {"evc-log", FamilyKind::ExtremeValue, {}},
      {"evc-jump", FamilyKind::ExtremeValue, {}},
  };
  return t;
}

struct Family {
  std::string name;
  FamilyKind kind;
  std::vector<Param> params;
  Copula copula;
  std::optional<GeneratorSpec> generator;
  std::optional<PickandsSpec> pickands;
};

/// Parses "key=value[,key=value]" with a locale-independent decimal point.
inline std::map<std::string, double> parse_params(const std::string& text) {
  std::map<std::string, double> out;
  if (text.empty()) return out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, end - pos);
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("bad parameter '" + item + "' (expected key=value)");
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    double x = 0.0;
    auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), x);
    if (ec != std::errc() || p != val.data() + val.size() || !std::isfinite(x)) {
      throw ValidationError("bad value for parameter " + key + ": '" + val + "'");
    }
    if (!out.emplace(key, x).second) throw ValidationError("duplicate parameter " + key);
    pos = end + 1;
  }
  return out;
}

inline Family make_family(const std::string& name, const std::map<std::string, double>& params,
                          double tol_eq = 1e-12) {
  const FamilyInfo* info = nullptr;
  for (const auto& f : family_table()) {
    if (f.name == name) info = &f;
  }
  if (!info) throw ValidationError("unknown family '" + name + "'");
  std::vector<Param> ordered;
  for (const auto& k : info->keys) {
    auto it = params.find(k);
    if (it == params.end()) throw ValidationError(name + ": missing parameter " + k);
    ordered.emplace_back(k, it->second);
  }
  for (const auto& [k, v] : params) {
    if (std::find(info->keys.begin(), info->keys.end(), k) == info->keys.end()) {
      throw ValidationError(name + ": unknown parameter " + k);
    }
  }
  auto p = [&](const std::string& k) { return params.at(k); };

  if (info->kind == FamilyKind::Archimedean) {
    auto g = builtin_archimedean(name, params);
    auto c = make_archimedean_copula(g, name, ordered);
    return Family{name, info->kind, ordered, std::move(c), std::move(g), std::nullopt};
  }
  if (info->kind == FamilyKind::ExtremeValue) {
    static const std::map<std::string, std::string> pickands_name = {
        {"evc-gumbel", "gumbel"},     {"mo", "marshall-olkin"},   {"tawn-sym", "tawn-symmetric"},
        {"tawn-mix", "tawn-asym-mixed"}, {"evc-log", "log-example"}, {"evc-jump", "jump-example"}};
    auto s = builtin_pickands(pickands_name.at(name), params);
    auto c = make_evc_copula(s, name, ordered);
    return Family{name, info->kind, ordered, std::move(c), std::nullopt, std::move(s)};
  }
  if (name == "m") return Family{name, info->kind, ordered, make_baseline(Baseline::M), std::nullopt, std::nullopt};
  if (name == "frechet") {
    return Family{name, info->kind, ordered, make_frechet(p("alpha"), p("beta"), tol_eq), std::nullopt,
                  std::nullopt};
  }
  if (name == "fgm") return Family{name, info->kind, ordered, make_fgm(p("theta")), std::nullopt, std::nullopt};
  return Family{name, info->kind, ordered, make_gaussian(p("rho")), std::nullopt, std::nullopt};
}

}  // namespace copdep

#endif  // COPDEP_REGISTRY_HPP
