#include "verify.hpp"

#include "csv.hpp"
#include "function_spec.hpp"

#include <foliate/bundle.hpp>
#include <foliate/errors.hpp>
#include <foliate/flow.hpp>
#include <foliate/geometry.hpp>
#include <foliate/operator.hpp>
#include <foliate/singular.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include <unistd.h>

namespace foliate::cli {
namespace {

constexpr double kPi = std::numbers::pi;

struct Invariant {
  std::string name;
  std::function<InvariantResult()> body;
};

std::string sci(double x) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << x;
  return s.str();
}

InvariantResult at_most(double value, double limit, const std::string& what = "value") {
  return {"", value <= limit, what + " " + sci(value) + " <= " + sci(limit)};
}

std::vector<LeafFunction> catalog() {
  return {LeafFunction::constant(1.0), LeafFunction::sine(), LeafFunction::cosine(),
          LeafFunction::polynomial({0.5, -0.25, 0.125, 0.0625}, -3.0, 3.0),
          LeafFunction::trigonometric(2.0 * kPi, {0.1, 0.5, 0.0}, {0.0, 0.3, 0.2})};
}

double sup_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

std::vector<Invariant> operator_suite() {
  const Eigen::VectorXd grid = make_grid(-2.0, 2.0, 401);
  const OperatorConfig cfg;
  return {
      {"operator.constant_absorption",
       [=] {
         const auto p = solve_on_line(LeafFunction::constant(2.5), grid, cfg);
         return at_most((p.values.array() - 2.5).abs().maxCoeff(), 1e-9, "max |u - 2.5|");
       }},
      {"operator.sine_closed_form",
       [=] {
         const auto p = solve_on_line(LeafFunction::sine(), grid, cfg);
         double e = 0.0;
         for (Eigen::Index k = 0; k < grid.size(); ++k) {
           e = std::max(e, std::abs(p.values[k] - 0.5 * (std::sin(grid[k]) - std::cos(grid[k]))));
         }
         return at_most(e, 1e-9, "max error");
       }},
      {"operator.residual_catalog",
       [=] {
         double worst = 0.0;
         for (const auto& v : catalog()) worst = std::max(worst, solve_on_line(v, grid, cfg).residual_sup);
         return at_most(worst, 1e-6, "worst residual");
       }},
      {"operator.truncation_certificate",
       [=] {
         double worst = 0.0;
         for (const auto& v : catalog()) {
           const auto p = solve_on_line(v, grid, cfg);
           OperatorConfig twice = cfg;
           twice.truncation = 2.0 * p.truncation;
           worst = std::max(worst, sup_diff(p.values, solve_on_line(v, grid, twice).values));
         }
         return at_most(worst, 0.5 * cfg.epsilon, "change under 2L");
       }},
      {"operator.linearity",
       [=] {
         const auto s = LeafFunction::sine();
         const auto c = LeafFunction::cosine();
         const ScalarFn mix = [&](double t) { return 2.0 * s(t) - 3.0 * c(t); };
         const auto pm = solve_on_line(mix, 5.0, grid, cfg);
         OperatorConfig fixed = cfg;
         fixed.truncation = pm.truncation;
         const auto ps = solve_on_line(s, grid, fixed);
         const auto pc = solve_on_line(c, grid, fixed);
         return at_most(sup_diff(pm.values, 2.0 * ps.values - 3.0 * pc.values), 1e-12, "deviation");
       }},
      {"operator.bound_preserved",
       [=] {
         double worst = 0.0;
         for (const auto& v : catalog()) {
           const auto p = solve_on_line(v, grid, cfg);
           worst = std::max(worst, p.values.cwiseAbs().maxCoeff() - v.bound());
         }
         return at_most(worst, 1e-9, "sup|u| - M");
       }},
      {"operator.periodic_matches_line",
       [=] {
         const Eigen::VectorXd th = make_grid(0.0, 2.0 * kPi * (1.0 - 1.0 / 256.0), 256);
         const auto v = catalog()[4];
         return at_most(sup_diff(solve_periodic(v, th, cfg).values, solve_on_line(v, th, cfg).values),
                        2e-9, "deviation");
       }},
      {"operator.shift_equivariance",
       [=] {
         const double c = 0.7;
         const auto v = LeafFunction::sine();
         const ScalarFn shifted = [&](double t) { return v(t + c); };
         const auto a = solve_on_line(shifted, v.bound(), grid, cfg);
         const Eigen::VectorXd moved = grid.array() + c;
         return at_most(sup_diff(a.values, solve_on_line(v, moved, cfg).values), 1e-12, "deviation");
       }},
      {"operator.unit_coefficient",
       [=] {
         const auto v = LeafFunction::cosine();
         const auto a = solve_with_coefficient(v, LeafFunction::constant(1.0), grid, cfg);
         return at_most(sup_diff(a.values, solve_on_line(v, grid, cfg).values), 1e-12, "deviation");
       }},
  };
}

std::vector<Invariant> geometry_suite() {
  const OperatorConfig cfg;
  return {
      {"geometry.torus_constant",
       [=] {
         const auto p = torus_solve(PlaneFunction::constant(1.0), 0.3, make_grid(0.0, 1.0, 101), cfg);
         return at_most((p.values.array() - 1.0).abs().maxCoeff(), 1e-9, "max |U - 1|");
       }},
      {"geometry.torus_periodicity",
       [=] {
         const auto v = PlaneFunction::torus(0.2, {{1.0, 1, 0, false}, {0.5, 0, 1, true}});
         const auto p = torus_solve(v, 0.1, make_grid(0.0, 1.0, 101), cfg);
         return at_most(p.periodicity_defect.value_or(1.0), 2e-9, "defect");
       }},
      {"geometry.spiral_constant",
       [=] {
         const auto p = spiral_solve(AnnulusFunction::constant(1.0), 0.4, make_grid(-10.0, 10.0, 201), cfg);
         return at_most((p.values.array() - 1.0).abs().maxCoeff(), 1e-9, "max |u - 1|");
       }},
      {"geometry.circle_constant",
       [=] {
         const auto p = circle_solve(AnnulusFunction::constant(1.0), 2.0, make_grid(0.0, 6.0, 61), cfg);
         return at_most((p.values.array() - 1.0).abs().maxCoeff(), 1e-9, "max |u - 1|");
       }},
      {"geometry.spiral_residual",
       [=] {
         const AnnulusFunction v({{1.0, 1, AnnulusFunction::Mode::cosine, 1},
                                  {-1.0, 0, AnnulusFunction::Mode::cosine, 1}});
         return at_most(spiral_solve(v, 0.0, make_grid(-10.0, 10.0, 401), cfg).residual_sup, 1e-6,
                        "residual");
       }},
      {"geometry.chart_round_trip",
       [] {
         double worst = 0.0;
         for (int i = 0; i < 100; ++i) {
           for (int j = 0; j < 100; ++j) {
             const double th = -30.0 + 60.0 * i / 99.0;
             const double s = -3.0 + 6.0 * j / 99.0;
             const Eigen::Vector2d p = chart_to_cartesian(th, s);
             const ChartPoint c = cartesian_to_chart(p.x(), p.y());
             worst = std::max({worst, std::abs(c.theta - th), std::abs(c.s - s)});
           }
         }
         return at_most(worst, 1e-10, "max deviation");
       }},
      {"geometry.chart_rejects_outside",
       [] {
         try {
           cartesian_to_chart(0.5, 0.0);
         } catch (const OutOfAnnulusError&) {
           return InvariantResult{"", true, "r = 0.5 rejected"};
         }
         return InvariantResult{"", false, "r = 0.5 accepted"};
       }},
      // The gap decays like 1/|theta| for this fixture, so the threshold is
      // taken far along the leaf.
      {"geometry.asymptotic_gap_decays",
       [=] {
         const AnnulusFunction v({{1.0, 1, AnnulusFunction::Mode::cosine, 1},
                                  {-1.0, 0, AnnulusFunction::Mode::cosine, 1}});
         const double near = asymptotic_gap(v, 0.0, -50.0, cfg);
         const double far = asymptotic_gap(v, 0.0, -300.0, cfg);
         const double farther = asymptotic_gap(v, 0.0, -1000.0, cfg);
         const bool ok = far < 1e-3 && farther < far && far < near;
         return InvariantResult{"", ok,
                                "gaps at -50, -300, -1000: " + sci(near) + ", " + sci(far) + ", " +
                                    sci(farther)};
       }},
  };
}

std::vector<Invariant> flow_suite() {
  const OperatorConfig cfg;
  auto translation = [] {
    return FlowMap(FlowField::translation(
        WorkingRegion::box(Eigen::Vector2d(-40.0, -5.0), Eigen::Vector2d(10.0, 5.0))));
  };
  auto rotation = [] {
    return FlowMap(FlowField::rotation(
        WorkingRegion::box(Eigen::Vector2d(-3.0, -3.0), Eigen::Vector2d(3.0, 3.0)), 0.5));
  };
  return {
      {"flow.constant_absorption",
       [=] {
         const auto t = translation();
         const auto r = rotation();
         const ScalarField one = ScalarField::constant(2, 1.0);
         const double a = std::abs(solve_field(t, one, Eigen::Vector2d(0.3, 0.1), cfg) - 1.0);
         const double b = std::abs(solve_field(r, one, Eigen::Vector2d(1.0, 0.5), cfg) - 1.0);
         return at_most(std::max(a, b), 1e-9, "max |U - 1|");
       }},
      {"flow.rotation_quarter_turn",
       [=] {
         const auto r = rotation();
         const Eigen::VectorXd p = r.flow(Eigen::Vector2d(1.0, 0.0), kPi / 2.0);
         return at_most((p - Eigen::Vector2d(0.0, 1.0)).norm(), 1e-10, "endpoint error");
       }},
      {"flow.group_property",
       [=] {
         const auto r = rotation();
         const Eigen::Vector2d x(1.2, -0.4);
         const Eigen::VectorXd a = r.flow(r.flow(x, -0.7), -0.5);
         const Eigen::VectorXd b = r.flow(x, -1.2);
         return at_most((a - b).norm(), 1e-10, "deviation");
       }},
      {"flow.translation_matches_line",
       [=] {
         const auto t = translation();
         const ScalarField v = ScalarField::axis(2, 0, 1.0, ScalarField::Profile::sine);
         const double x = 0.8;
         const double u = solve_field(t, v, Eigen::Vector2d(x, 0.2), cfg);
         return at_most(std::abs(u - 0.5 * (std::sin(x) - std::cos(x))), 1e-9, "error");
       }},
      {"flow.derivative_matches_differences",
       [=] {
         const auto t = translation();
         const ScalarField v = ScalarField::axis(2, 0, 1.0, ScalarField::Profile::sine);
         const Eigen::Vector2d x(kPi / 2.0, 0.1);
         const Eigen::Vector2d e(1.0, 0.0);
         const double h = 1e-4;
         const double up = solve_field(t, v, x + h * e, cfg);
         const double u0 = solve_field(t, v, x, cfg);
         const double um = solve_field(t, v, x - h * e, cfg);
         const double d1 = solve_field_derivative(t, v, x, 0, cfg, 1);
         const double d2 = solve_field_derivative(t, v, x, 0, cfg, 2);
         const double worst = std::max(std::abs(d1 - (up - um) / (2.0 * h)),
                                       std::abs(d2 - (up - 2.0 * u0 + um) / (h * h)));
         return at_most(worst, 1e-5, "max discrepancy");
       }},
      {"flow.richardson_order",
       [=] {
         const auto t = translation();
         const ScalarField v = ScalarField::axis(2, 0, 1.0, ScalarField::Profile::sine);
         const auto rep = smoothness_order_check(t, v, Eigen::Vector2d(kPi / 2.0, 0.1), 0, 2, cfg);
         bool ok = true;
         std::string detail = "orders";
         for (const auto& o : rep.orders) {
           ok = ok && !o.exact && !o.noise_floor && o.estimated_order >= 1.7 && o.estimated_order <= 2.3;
           detail += " " + std::to_string(o.estimated_order);
         }
         return InvariantResult{"", ok, detail};
       }},
      {"flow.rejects_stationary_point",
       [] {
         try {
           using P = ScalarField::Profile;
           FlowField({ScalarField::axis(2, 1, -1.0, P::linear), ScalarField::axis(2, 0, 1.0, P::linear)},
                     WorkingRegion::box(Eigen::Vector2d(-1.0, -1.0), Eigen::Vector2d(1.0, 1.0)), 1e-3);
         } catch (const DomainError&) {
           return InvariantResult{"", true, "vanishing field rejected"};
         }
         return InvariantResult{"", false, "vanishing field accepted"};
       }},
  };
}

std::vector<Invariant> singular_suite() {
  return {
      {"singular.constant_bound",
       [] {
         const auto sol = singular_line_solve(LeafFunction::constant(1.0), make_grid(-50.0, 50.0, 10001));
         return at_most(sol.values.cwiseAbs().maxCoeff(), 3.0 + 1e-6, "sup|u|");
       }},
      {"singular.removable_limit",
       [] {
         const auto one = LeafFunction::constant(1.0);
         const double e = std::max(std::abs(singular_line_value(one, 1e-6) - 1.0),
                                   std::abs(singular_line_value(one, -1e-6) - 1.0));
         return at_most(e, 1e-5, "|u(+-1e-6) - 1|");
       }},
      {"singular.junction_gaps",
       [] {
         const auto sol = singular_line_solve(LeafFunction::cosine(), make_grid(-10.0, 10.0, 2001));
         return at_most(sol.max_gap(), 1e-6, "max gap");
       }},
      {"singular.residual",
       [] {
         const auto v = LeafFunction::sine();
         const auto sol = singular_line_solve(v, make_grid(-10.0, 10.0, 2001));
         return at_most(singular_line_residual(sol, v), 1e-6, "residual");
       }},
      {"singular.naive_forms_diverge",
       [] {
         bool ok = true;
         std::string detail = "peaks";
         for (const auto& n : naive_singular_demos()) {
           ok = ok && n.peak > 10.0;
           detail += " " + sci(n.peak);
         }
         return InvariantResult{"", ok, detail};
       }},
      {"singular.obstruction_slope",
       [] {
         const auto r = circle_obstruction(LeafFunction::constant(1.0));
         const double rel = std::abs(r.measured_slope - r.predicted_slope) / std::abs(r.predicted_slope);
         return InvariantResult{"", r.divergent && rel <= 0.2,
                                "divergent " + std::to_string(r.divergent) + ", slope error " + sci(rel)};
       }},
      {"singular.obstruction_zero_input",
       [] { return at_most(circle_obstruction(LeafFunction::constant(0.0)).defect, 1e-12, "defect"); }},
  };
}

std::vector<Invariant> bundle_suite() {
  const GlueConfig cfg;
  return {
      {"bundle.circle_cocycle",
       [] { return at_most(verify_cocycle(circle_cover()).max_deviation(), 1e-12, "deviation"); }},
      {"bundle.torus_cocycle",
       [] { return at_most(verify_cocycle(torus_cover()).max_deviation(), 1e-12, "deviation"); }},
      {"bundle.inconsistent_triple_flagged",
       [] {
         const BundleCover bad({{"A", 0.0, 3.0, BoxWeight::one},
                                {"B", 1.0, 3.0, BoxWeight::one},
                                {"C", 1.0, 4.0, BoxWeight::one}},
                               {{"A", "B", 1.0, 3.0, 1.0},
                                {"B", "C", 1.0, 3.0, 1.0},
                                {"A", "C", 1.0, 3.0, 2.0}});
         const auto r = verify_cocycle(bad);
         return InvariantResult{"", !r.consistent() && r.triples_checked > 0,
                                "triple deviation " + sci(r.triple_deviation)};
       }},
      {"bundle.circle_periodicity",
       [=] {
         double worst = 0.0;
         for (const auto& v : catalog()) {
           if (!v.has_period(2.0 * kPi)) continue;
           worst = std::max(worst, circle_bundle_solve(v, cfg).periodicity_defect.value_or(1.0));
         }
         return at_most(worst, 2e-9, "defect");
       }},
      {"bundle.circle_overlap_agreement",
       [=] { return at_most(circle_bundle_solve(LeafFunction::sine(), cfg).max_mismatch(), 1e-12, "mismatch"); }},
      {"bundle.torus_periodicity",
       [=] {
         const auto v = PlaneFunction::torus(0.0, {{1.0, 1, 0, false}, {0.4, 1, 1, true}});
         const auto s = torus_bundle_solve(v, {0.0, 0.3}, cfg);
         return at_most(std::max(s.periodicity_defect.value_or(1.0), s.max_mismatch()), 2e-9,
                        "max(defect, mismatch)");
       }},
      {"bundle.transport_round_trip",
       [] {
         const double c = std::exp(-2.0 * kPi);
         return at_most(std::abs(transport(transport(0.37, c), 1.0 / c) - 0.37), 1e-15, "error");
       }},
      {"bundle.cover_missing_transition",
       [] {
         try {
           parse_cover("box a 0 2 exp\nbox b 1 3 exp\noverlap a b 1 2\n");
         } catch (const StructuralError&) {
           return InvariantResult{"", true, "rejected"};
         }
         return InvariantResult{"", false, "accepted"};
       }},
  };
}

std::vector<Invariant> cli_suite() {
  return {
      {"cli.csv_round_trip",
       [] {
         const auto dir = std::filesystem::temp_directory_path();
         const auto path = dir / ("foliate_verify_" + std::to_string(::getpid()) + ".csv");
         Eigen::VectorXd a(4), b(4);
         a << 0.1, -1.0 / 3.0, 1e-300, 6.02214076e23;
         b << std::nextafter(1.0, 2.0), kPi, -0.0, 123456789.0;
         write_csv(path, {{"a", "b"}, {a, b}});
         const CsvTable back = read_csv(path);
         std::filesystem::remove(path);
         const bool ok = back.columns.size() == 2 && back.columns[0] == a && back.columns[1] == b;
         return InvariantResult{"", ok, ok ? "bit-exact" : "values differ"};
       }},
      {"cli.grid_spec",
       [] {
         const GridSpec g = parse_grid("-2:2:401");
         bool rejected = false;
         try {
           parse_grid("0:1:2");
         } catch (const SpecError&) {
           rejected = true;
         }
         return InvariantResult{"", g.lo == -2.0 && g.hi == 2.0 && g.count == 401 && rejected,
                                "parsed and rejected count 2"};
       }},
      {"cli.function_specs",
       [] {
         const auto f = parse_leaf_function("fourier:P=2pi,a0=1,b1=2");
         const double err = std::abs(f(0.3) - (1.0 + 2.0 * std::sin(0.3)));
         return at_most(err, 1e-15, "evaluation error");
       }},
  };
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"operator", "geometry", "flow", "singular", "bundle", "cli"};
  return names;
}

std::vector<InvariantResult> run_suite(const std::string& suite) {
  std::vector<Invariant> all;
  auto append = [&](std::vector<Invariant> more) {
    for (auto& m : more) all.push_back(std::move(m));
  };
  const bool every = suite == "all";
  bool known = every;
  const std::vector<std::pair<std::string, std::function<std::vector<Invariant>()>>> table{
      {"operator", operator_suite}, {"geometry", geometry_suite}, {"flow", flow_suite},
      {"singular", singular_suite}, {"bundle", bundle_suite},     {"cli", cli_suite}};
  for (const auto& [name, make] : table) {
    if (every || suite == name) {
      append(make());
      known = true;
    }
  }
  if (!known) throw SpecError("unknown suite '" + suite + "'");

  std::vector<InvariantResult> out;
  for (const auto& inv : all) {
    InvariantResult r;
    try {
      r = inv.body();
    } catch (const std::exception& e) {
      r = {"", false, std::string("threw: ") + e.what()};
    }
    r.name = inv.name;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace foliate::cli
