#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "copdep/copdep.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNothingToConstruct = 3;

struct Options {
  std::string family;
  std::string params;
  std::string property;
  int grid = 256;
  double margin = 0.005;
  double tol_strict = 1e-9;
  double tol_eq = 1e-12;
  std::string spacing = "uniform";
  std::string rect;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::string out;
  std::string quantity = "cdf";
  bool timing = false;
};

copdep::GridConfig grid_config(const Options& o) {
  copdep::GridConfig g;
  g.n_u = g.n_v = o.grid;
  g.margin = o.margin;
  g.tol_strict = o.tol_strict;
  g.tol_eq = o.tol_eq;
  g.spacing = o.spacing == "logit" ? copdep::Spacing::Logit : copdep::Spacing::Uniform;
  g.validate();
  return g;
}

copdep::Rectangle parse_rect(const std::string& s) {
  std::vector<double> xs;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t end = std::min(s.find(',', pos), s.size());
    double x = 0.0;
    auto [p, ec] = std::from_chars(s.data() + pos, s.data() + end, x);
    if (ec != std::errc() || p != s.data() + end) throw copdep::ValidationError("bad --rect value '" + s + "'");
    xs.push_back(x);
    pos = end + 1;
  }
  if (xs.size() != 4) throw copdep::ValidationError("--rect expects u1,u2,v1,v2");
  return {xs[0], xs[1], xs[2], xs[3]};
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw copdep::ValidationError("cannot open " + o.out);
  f << text;
}

void emit_report(const Options& o, copdep::Report r, std::chrono::steady_clock::time_point start) {
  if (o.timing) {
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  emit(o, copdep::to_json(r).dump(2) + "\n");
}

std::string grid_export(const copdep::Family& f, const std::string& quantity, const copdep::GridConfig& g) {
  using namespace copdep;
  std::function<double(double, double)> q;
  if (quantity == "cdf") {
    q = [&](double u, double v) { return f.copula.cdf(u, v); };
  } else if (quantity == "kernel") {
    q = [&](double u, double v) { return f.copula.kernel(u, v); };
  } else if (quantity == "density") {
    if (!f.copula.has_density()) throw ValidationError(f.name + " exposes no density");
    q = [&](double u, double v) { return f.copula.density(u, v); };
  } else if (quantity == "FA") {
    if (!f.pickands) throw ValidationError("FA is defined for extreme value families only");
    q = [&](double u, double v) { return cap_function(*f.pickands, h_map(u, v)); };
  } else {
    throw ValidationError("unknown quantity '" + quantity + "'");
  }
  std::ostringstream os;
  os << "u,v,value\n";
  char buf[96];
  for (double u : grid_u(g)) {
    for (double v : grid_v(g)) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", u, v, q(u, v));
      os << buf;
    }
  }
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Positive dependence classification for bivariate copulas"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--family", o.family, "copula family")->required();
    sub->add_option("--param", o.params, "parameters as key=value[,key=value]");
  };
  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--grid", o.grid, "points per axis")->check(CLI::Range(2, 1 << 16));
    sub->add_option("--margin", o.margin, "distance of the grid from the boundary");
    sub->add_option("--tol-strict", o.tol_strict, "violation threshold");
    sub->add_option("--tol-eq", o.tol_eq, "equality tolerance");
    sub->add_option("--spacing", o.spacing, "grid spacing")->check(CLI::IsMember({"uniform", "logit"}));
  };
  auto add_report = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "write to this file instead of stdout");
    sub->add_flag("--timing", o.timing, "include wall-clock timing in the report");
  };
  const std::vector<std::string> props{"pqd", "ltd", "si", "tp2", "mktp2", "dtp2"};

  auto* classify = app.add_subcommand("classify", "classify all six properties");
  add_common(classify);
  add_grid(classify);
  add_report(classify);

  auto* check = app.add_subcommand("check", "check one property");
  add_common(check);
  add_grid(check);
  add_report(check);
  check->add_option("--property", o.property)->required()->check(CLI::IsMember(props));
  check->add_option("--rect", o.rect, "evaluate at u1,u2,v1,v2 only");

  auto* witness = app.add_subcommand("witness", "construct a violating rectangle");
  add_common(witness);
  add_grid(witness);
  add_report(witness);
  o.property = "mktp2";
  witness->add_option("--property", o.property)->check(CLI::IsMember(props));

  auto* sample = app.add_subcommand("sample", "draw a sample by kernel inversion");
  add_common(sample);
  sample->add_option("--n", o.n, "sample size")->check(CLI::PositiveNumber);
  sample->add_option("--seed", o.seed, "64-bit seed");
  sample->add_option("--out", o.out, "CSV file (default stdout)");

  auto* grid_exp = app.add_subcommand("grid-export", "tabulate a quantity on the grid");
  add_common(grid_exp);
  add_grid(grid_exp);
  grid_exp->add_option("--quantity", o.quantity)->check(CLI::IsMember({"cdf", "kernel", "density", "FA"}));
  grid_exp->add_option("--out", o.out, "CSV file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    const auto family = copdep::make_family(o.family, copdep::parse_params(o.params), o.tol_eq);
    if (*classify) {
      emit_report(o, copdep::classify_report(family, grid_config(o)), start);
    } else if (*check) {
      const auto p = copdep::parse_property(o.property);
      const auto g = grid_config(o);
      if (!o.rect.empty()) {
        emit_report(o, copdep::rect_report(family, p, parse_rect(o.rect), g), start);
      } else {
        emit_report(o, copdep::check_report(family, p, g), start);
      }
    } else if (*witness) {
      emit_report(o, copdep::witness_report(family, copdep::parse_property(o.property), grid_config(o)), start);
    } else if (*sample) {
      std::ostringstream os;
      copdep::write_csv(os, copdep::sample(family.copula, o.n, o.seed));
      emit(o, os.str());
    } else if (*grid_exp) {
      emit(o, grid_export(family, o.quantity, grid_config(o)));
    }
  } catch (const copdep::NothingToConstruct& e) {
    std::cerr << "nothing to construct: " << e.what() << '\n';
    return kExitNothingToConstruct;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
