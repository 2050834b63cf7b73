#ifndef COPDEP_REPORT_HPP
#define COPDEP_REPORT_HPP

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "copdep/archimedean.hpp"
#include "copdep/extreme_value.hpp"
#include "copdep/properties.hpp"
#include "copdep/registry.hpp"
#include "copdep/verdict.hpp"

namespace copdep {

inline constexpr const char* kToolName = "copdep";
inline constexpr const char* kToolVersion = "1.0.0";

/// Raised by the witness command when there is nothing to construct.
class NothingToConstruct : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Entry {
  Property property = Property::Pqd;
  Verdict verdict;
  /// Witness of the analytic criterion when the reported witness was relocated to the (u,v) square.
  std::optional<Witness> criterion_witness;
};

struct Report {
  std::string command;
  std::string family;
  std::string label;
  std::vector<Param> params;
  FamilyKind route = FamilyKind::Closed;
  GridConfig grid;
  std::vector<Entry> entries;
  std::optional<std::string> branch;
  std::optional<std::string> construction;
  std::vector<std::string> notes;
  std::optional<ContinuousWitnessAux> aux;
  std::optional<double> seconds;
};

namespace detail {

// Swaps a criterion-space witness for a (u,v) location found by the grid engine.
inline Entry locate(const Copula& c, Property p, Verdict v, bool native, const GridConfig& g) {
  Entry e{p, std::move(v), std::nullopt};
  if (!e.verdict.fails() || native) return e;
  Verdict grid = check_property(c, p, g);
  if (grid.fails() && grid.witness) {
    e.criterion_witness = e.verdict.witness;
    e.verdict.witness = grid.witness;
    e.verdict.worst_defect = grid.worst_defect;
    e.verdict.note += "; witness located by grid scan";
  }
  return e;
}

// Analytic verdicts carry the tolerances of the run but no grid size.
inline void stamp_certificates(Report& r) {
  for (auto& e : r.entries) {
    auto& c = e.verdict.certificate;
    if (e.verdict.method != Method::Analytic) continue;
    if (c.tol_strict != 0.0) {
      if (c.margin == 0.0) c.margin = r.grid.margin;
      continue;
    }
    const int points = c.points;
    c = Certificate::from(r.grid);
    c.n_u = c.n_v = 0;
    c.points = points;
  }
}

}  // namespace detail

inline Report build_report(const Family& f, const std::vector<Property>& props, const GridConfig& g,
                           std::string command) {
  g.validate();
  Report r;
  r.command = std::move(command);
  r.family = f.name;
  r.label = make_label(f.name, f.params);
  r.params = f.params;
  r.route = f.kind;
  r.grid = g;
  const Copula& c = f.copula;

  if (f.kind == FamilyKind::Closed) {
    for (Property p : props) r.entries.push_back({p, check_property(c, p, g), std::nullopt});
    detail::stamp_certificates(r);
    return r;
  }
  if (f.kind == FamilyKind::Archimedean) {
    const auto a = classify_archimedean(*f.generator, g);
    const bool ns = !a.strict;
    for (Property p : props) {
      switch (p) {
        case Property::Pqd: r.entries.push_back({p, a.pqd, std::nullopt}); break;
        case Property::Ltd: {
          Verdict v = a.tp2_ltd;
          v.note = "LTD is equivalent to TP2 for Archimedean copulas; " + v.note;
          r.entries.push_back(detail::locate(c, p, v, false, g));
          break;
        }
        case Property::Tp2: r.entries.push_back(detail::locate(c, p, a.tp2_ltd, ns, g)); break;
        case Property::Si: {
          const bool native = ns && a.mktp2_si.witness && a.mktp2_si.witness->kind == WitnessKind::Segment;
          r.entries.push_back(detail::locate(c, p, a.mktp2_si, native, g));
          break;
        }
        case Property::Mktp2: {
          Verdict v = a.mktp2_si;
          v.note = "MK-TP2 is equivalent to SI for Archimedean copulas; " + v.note;
          r.entries.push_back(detail::locate(c, p, v, false, g));
          break;
        }
        case Property::Dtp2: r.entries.push_back(detail::locate(c, p, a.dtp2, false, g)); break;
      }
    }
    if (!a.d_minus_psi_continuous.holds()) r.notes.push_back("D^-psi scan: " + a.d_minus_psi_continuous.note);
    detail::stamp_certificates(r);
    return r;
  }
  const auto e = classify_evc(*f.pickands, g);
  r.branch = e.branch;
  r.notes = e.notes;
  r.aux = e.aux;
  for (Property p : props) {
    switch (p) {
      case Property::Pqd: r.entries.push_back({p, e.pqd, std::nullopt}); break;
      case Property::Ltd: r.entries.push_back({p, e.ltd, std::nullopt}); break;
      case Property::Si: r.entries.push_back({p, e.si, std::nullopt}); break;
      case Property::Tp2: r.entries.push_back({p, e.tp2, std::nullopt}); break;
      case Property::Mktp2: r.entries.push_back({p, e.mktp2, std::nullopt}); break;
      case Property::Dtp2: r.entries.push_back({p, e.dtp2, std::nullopt}); break;
    }
  }
  detail::stamp_certificates(r);
  return r;
}

inline Report classify_report(const Family& f, const GridConfig& g) {
  return build_report(f, {std::begin(kAllProperties), std::end(kAllProperties)}, g, "classify");
}

inline Report check_report(const Family& f, Property p, const GridConfig& g) {
  return build_report(f, {p}, g, "check");
}

/// Re-evaluates one property at an explicit rectangle.
inline Report rect_report(const Family& f, Property p, const Rectangle& rect, const GridConfig& g) {
  Report r;
  r.command = "check";
  r.family = f.name;
  r.label = make_label(f.name, f.params);
  r.params = f.params;
  r.route = f.kind;
  r.grid = g;
  r.entries.push_back({p, evaluate_witness(f.copula, p, rect, g), std::nullopt});
  return r;
}

/// Constructive witness for an EVC, else the coarse-to-fine grid search.
inline Report witness_report(const Family& f, Property p, const GridConfig& g) {
  Report r = build_report(f, {p}, g, "witness");
  Entry& e = r.entries.front();
  if (e.verdict.status == Status::NotApplicable) {
    throw NothingToConstruct(std::string(to_string(p)) + " is not applicable to " + r.label + ": " +
                             e.verdict.note);
  }
  if (e.verdict.holds() && e.verdict.method == Method::Analytic) {
    throw NothingToConstruct(std::string(to_string(p)) + " holds analytically for " + r.label + ": " +
                             e.verdict.note);
  }
  if (f.kind == FamilyKind::ExtremeValue && p == Property::Mktp2 && e.verdict.fails() &&
      e.verdict.method == Method::Analytic && e.verdict.witness) {
    const auto& b = *r.branch;
    if (b == "2") {
      r.construction = pickands_jumps(*f.pickands).empty() ? "gradient" : "jump";
    } else if (b == "3c") {
      r.construction = "constant";
    } else {
      r.construction = "jump";
    }
    return r;
  }
  e.verdict = counterexample_search(f.copula, p, g);
  e.criterion_witness.reset();
  r.construction = "search";
  return r;
}

// JSON

inline nlohmann::ordered_json json_number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

inline nlohmann::ordered_json to_json(const Rectangle& r) {
  return {{"u1", r.u1}, {"u2", r.u2}, {"v1", r.v1}, {"v2", r.v2}};
}

inline nlohmann::ordered_json to_json(const Witness& w) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(w.kind);
  if (w.kind == WitnessKind::Triple || w.kind == WitnessKind::Jump) {
    j["coords"] = w.coords;
  } else {
    j["rect"] = to_json(w.rect);
  }
  auto vals = nlohmann::ordered_json::array();
  for (double x : w.values) vals.push_back(json_number(x));
  j["values"] = vals;
  j["defect"] = json_number(w.defect);
  if (w.cross_ratio) j["cross_ratio"] = json_number(*w.cross_ratio);
  return j;
}

inline nlohmann::ordered_json to_json(const Certificate& c) {
  nlohmann::ordered_json j{{"n_u", c.n_u},       {"n_v", c.n_v},           {"points", c.points},
                           {"margin", c.margin}, {"tol_eq", c.tol_eq},     {"tol_strict", c.tol_strict},
                           {"spacing", to_string(c.spacing)}};
  if (c.region) {
    j["region"] = {{"u_lo", c.region->u_lo}, {"u_hi", c.region->u_hi}, {"v_lo", c.region->v_lo},
                   {"v_hi", c.region->v_hi}};
  }
  return j;
}

inline nlohmann::ordered_json to_json(const Entry& e) {
  nlohmann::ordered_json j;
  j["property"] = to_string(e.property);
  j["status"] = to_string(e.verdict.status);
  j["method"] = to_string(e.verdict.method);
  j["certificate"] = to_json(e.verdict.certificate);
  if (e.verdict.witness) j["witness"] = to_json(*e.verdict.witness);
  if (e.criterion_witness) j["criterion_witness"] = to_json(*e.criterion_witness);
  j["worst_defect"] = json_number(e.verdict.worst_defect);
  j["note"] = e.verdict.note;
  return j;
}

inline nlohmann::ordered_json to_json(const Report& r) {
  nlohmann::ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = r.command;
  j["family"] = r.family;
  j["label"] = r.label;
  auto params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.params) params[k] = v;
  j["params"] = params;
  j["route"] = to_string(r.route);
  j["grid"] = {{"n_u", r.grid.n_u},
               {"n_v", r.grid.n_v},
               {"margin", r.grid.margin},
               {"tol_eq", r.grid.tol_eq},
               {"tol_strict", r.grid.tol_strict},
               {"spacing", to_string(r.grid.spacing)}};
  auto entries = nlohmann::ordered_json::array();
  for (const auto& e : r.entries) entries.push_back(to_json(e));
  j["entries"] = entries;
  if (r.branch) j["branch"] = *r.branch;
  if (r.construction) j["construction"] = *r.construction;
  if (r.aux) {
    j["gradient_aux"] = {{"beta_A", r.aux->beta_A},           {"alpha", r.aux->alpha},
                         {"g_alpha", r.aux->g_alpha},         {"g_beta_A", r.aux->g_beta_A},
                         {"gamma_alpha", json_number(r.aux->gamma_alpha)}, {"best_ratio", r.aux->best_ratio}};
  }
  j["notes"] = r.notes;
  if (r.seconds) j["timing"] = {{"seconds", *r.seconds}};
  return j;
}

}  // namespace copdep

#endif  // COPDEP_REPORT_HPP
