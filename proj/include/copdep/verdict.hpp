#ifndef COPDEP_VERDICT_HPP
#define COPDEP_VERDICT_HPP

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "copdep/core.hpp"

namespace copdep {

enum class Status { Holds, Fails, Inconclusive, NotApplicable };
enum class Method { Analytic, Grid };
enum class Property { Pqd, Ltd, Si, Tp2, Mktp2, Dtp2 };

inline constexpr Property kAllProperties[] = {Property::Pqd, Property::Ltd,   Property::Si,
                                              Property::Tp2, Property::Mktp2, Property::Dtp2};

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Holds: return "Holds";
    case Status::Fails: return "Fails";
    case Status::Inconclusive: return "Inconclusive";
    case Status::NotApplicable: return "NotApplicable";
  }
  return "?";
}

inline const char* to_string(Method m) { return m == Method::Analytic ? "analytic" : "grid"; }

inline const char* to_string(Property p) {
  switch (p) {
    case Property::Pqd: return "pqd";
    case Property::Ltd: return "ltd";
    case Property::Si: return "si";
    case Property::Tp2: return "tp2";
    case Property::Mktp2: return "mktp2";
    case Property::Dtp2: return "dtp2";
  }
  return "?";
}

inline Property parse_property(const std::string& s) {
  for (Property p : kAllProperties) {
    if (s == to_string(p)) return p;
  }
  throw ValidationError("unknown property '" + s + "'");
}

inline const char* to_string(Spacing s) { return s == Spacing::Uniform ? "uniform" : "logit"; }

enum class WitnessKind { Point, Segment, Rectangle, Triple, Jump };

inline const char* to_string(WitnessKind k) {
  switch (k) {
    case WitnessKind::Point: return "point";
    case WitnessKind::Segment: return "segment";
    case WitnessKind::Rectangle: return "rectangle";
    case WitnessKind::Triple: return "triple";
    case WitnessKind::Jump: return "jump";
  }
  return "?";
}

/// Location of a violation. Copula witnesses always fill `rect`
/// (a point has u1=u2, v1=v2; a segment has v1=v2). One-dimensional
/// witnesses use `coords` instead.
struct Witness {
  WitnessKind kind = WitnessKind::Rectangle;
  Rectangle rect;
  std::vector<double> coords;
  std::vector<double> values;
  double defect = 0.0;
  std::optional<double> cross_ratio;
};

struct Certificate {
  int n_u = 0;
  int n_v = 0;
  int points = 0;
  double margin = 0.0;
  double tol_eq = 0.0;
  double tol_strict = 0.0;
  Spacing spacing = Spacing::Uniform;
  std::optional<Region> region;

  static Certificate from(const GridConfig& g) {
    Certificate c;
    c.n_u = g.n_u;
    c.n_v = g.n_v;
    c.margin = g.margin;
    c.tol_eq = g.tol_eq;
    c.tol_strict = g.tol_strict;
    c.spacing = g.spacing;
    c.region = g.region;
    return c;
  }
};

struct Verdict {
  Status status = Status::Inconclusive;
  Method method = Method::Grid;
  std::optional<Witness> witness;
  Certificate certificate;
  std::string note;
  /// Largest defect seen (positive means violated); NaN when not applicable.
  double worst_defect = 0.0;

  [[nodiscard]] bool holds() const { return status == Status::Holds; }
  [[nodiscard]] bool fails() const { return status == Status::Fails; }
};

inline Status classify_defect(double defect, double tol_eq, double tol_strict) {
  if (defect > tol_strict) return Status::Fails;
  if (defect > tol_eq) return Status::Inconclusive;
  return Status::Holds;
}

inline Verdict analytic(Status s, std::string note, std::optional<Witness> w = std::nullopt) {
  Verdict v;
  v.status = s;
  v.method = Method::Analytic;
  v.note = std::move(note);
  v.witness = std::move(w);
  if (v.witness) v.worst_defect = v.witness->defect;
  return v;
}

inline Verdict not_applicable(std::string note) {
  Verdict v;
  v.status = Status::NotApplicable;
  v.method = Method::Analytic;
  v.note = std::move(note);
  v.worst_defect = std::nan("");
  return v;
}

}  // namespace copdep

#endif  // COPDEP_VERDICT_HPP
