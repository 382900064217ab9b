#include "cli.hpp"

#include "csv.hpp"
#include "function_spec.hpp"
#include "verify.hpp"

#include <foliate/bundle.hpp>
#include <foliate/errors.hpp>
#include <foliate/flow.hpp>
#include <foliate/geometry.hpp>
#include <foliate/operator.hpp>
#include <foliate/singular.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>

namespace foliate::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// JSON has no NaN or infinity; they are written as strings.
json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

class Report {
 public:
  // Every top-level key exists up front: ordered_json stores members in a
  // vector, so adding one later would invalidate scenario() references.
  explicit Report(std::string subcommand) {
    doc_["subcommand"] = std::move(subcommand);
    doc_["scenario"] = json::object();
    doc_["metrics"] = json::object();
    doc_["checks"] = json::array();
    doc_["outputs"] = json::array();
    doc_["pass"] = true;
    doc_["wall_time_s"] = 0.0;
  }

  json& scenario() { return doc_["scenario"]; }
  json& metrics() { return doc_["metrics"]; }
  void metric(const std::string& name, double value) { doc_["metrics"][name] = number(value); }

  /// Declared tolerance `value <= limit`; NaN fails.
  void check(const std::string& name, double value, double limit) {
    const bool ok = value <= limit;
    checks_.push_back({{"name", name}, {"value", number(value)}, {"limit", number(limit)},
                       {"pass", ok}});
    pass_ = pass_ && ok;
  }
  void check_flag(const std::string& name, bool ok, const std::string& detail) {
    checks_.push_back({{"name", name}, {"detail", detail}, {"pass", ok}});
    pass_ = pass_ && ok;
  }
  void output(const fs::path& p) { outputs_.push_back(p.string()); }
  bool pass() const { return pass_; }

  void write(const fs::path& path, double seconds, std::ostream& out) {
    doc_["checks"] = checks_;
    doc_["outputs"] = outputs_;
    doc_["pass"] = pass_;
    doc_["wall_time_s"] = seconds;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << doc_.dump(2) << '\n';
    if (!f) throw std::runtime_error("failed writing " + path.string());
    for (const auto& c : checks_) {
      out << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>();
      if (c.contains("value")) out << " value=" << c["value"].dump() << " limit=" << c["limit"].dump();
      if (c.contains("detail")) out << " (" << c["detail"].get<std::string>() << ")";
      out << '\n';
    }
    out << "report: " << path.string() << '\n';
  }

 private:
  json doc_;
  json checks_ = json::array();
  json outputs_ = json::array();
  bool pass_ = true;
};

struct Common {
  std::string out_dir;
  std::string name;
  double eps = 1e-9;
  double step = 1e-2;
  std::optional<double> truncation;
  double margin = 2.0;

  OperatorConfig config() const {
    OperatorConfig c;
    c.epsilon = eps;
    c.quad_step = step;
    c.truncation = truncation;
    c.margin = margin;
    c.validate();
    return c;
  }

  fs::path directory() const {
    fs::path dir = out_dir;
    if (dir.empty()) {
      const char* env = std::getenv("FOLIATE_OUT_DIR");
      dir = (env && *env) ? fs::path(env) : fs::current_path();
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
  }

  void echo(json& s) const {
    s["epsilon"] = eps;
    s["quad_step"] = step;
    s["truncation"] = truncation ? json(*truncation) : json(nullptr);
    s["margin"] = margin;
  }
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out_dir, "Output directory (default $FOLIATE_OUT_DIR or .)");
  sub->add_option("--name", c.name, "File stem for outputs (default: subcommand name)");
  sub->add_option("--eps", c.eps, "Truncation accuracy epsilon")->capture_default_str();
  sub->add_option("--step", c.step, "Quadrature panel width")->capture_default_str();
  sub->add_option("--truncation", c.truncation, "Fixed truncation depth L");
  sub->add_option("--margin", c.margin, "Added to ln(4M/eps) for the depth")->capture_default_str();
}

Eigen::VectorXd grid_from(const std::string& text) {
  const GridSpec g = parse_grid(text);
  return make_grid(g.lo, g.hi, g.count);
}

std::vector<double> number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(parse_number(item));
  if (out.empty()) throw SpecError("empty list '" + text + "'");
  return out;
}

Eigen::VectorXd vector_from(const std::string& text) {
  const auto v = number_list(text);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

struct Stems {
  fs::path dir;
  std::string stem;
  fs::path file(const std::string& suffix) const { return dir / (stem + suffix); }
};

Stems stems(const Common& c, const std::string& sub) {
  return {c.directory(), c.name.empty() ? sub : c.name};
}

// ---------------------------------------------------------------- solve-line

struct LineArgs {
  Common common;
  std::string v;
  std::string grid = "-2:2:401";
  bool periodic = false;
  std::string coefficient;
  double tol_residual = 1e-6;
  double tol_periodicity = 2e-9;
};

void solve_line(const LineArgs& a, Report& rep) {
  const LeafFunction v = parse_leaf_function(a.v);
  const Eigen::VectorXd grid = grid_from(a.grid);
  const OperatorConfig cfg = a.common.config();
  auto& s = rep.scenario();
  s["v"] = a.v;
  s["grid"] = a.grid;
  s["periodic"] = a.periodic;
  s["coefficient"] = a.coefficient.empty() ? json(nullptr) : json(a.coefficient);
  a.common.echo(s);

  SolutionProfile p;
  if (!a.coefficient.empty()) {
    p = solve_with_coefficient(v, parse_leaf_function(a.coefficient), grid, cfg);
  } else if (a.periodic) {
    p = solve_periodic(v, grid, cfg);
  } else {
    p = solve_on_line(v, grid, cfg);
  }
  rep.metric("residual_sup", p.residual_sup);
  rep.metric("truncation", p.truncation);
  rep.metrics()["clamped"] = p.clamped;
  rep.check("residual_sup", p.residual_sup, a.tol_residual);
  if (p.periodicity_defect) {
    rep.metric("periodicity_defect", *p.periodicity_defect);
    rep.check("periodicity_defect", *p.periodicity_defect, a.tol_periodicity);
  }

  const Stems st = stems(a.common, "solve-line");
  Eigen::VectorXd vv = grid.unaryExpr([&](double x) { return v(x); });
  write_csv(st.file(".csv"), {{"x", "u", "v"}, {grid, p.values, vv}});
  rep.output(st.file(".csv"));
}

// --------------------------------------------------------------- solve-torus

struct TorusArgs {
  Common common;
  std::string v;
  double offset = 0.0;
  std::string grid = "0:1:201";
  double tol_residual = 1e-6;
  double tol_periodicity = 2e-9;
};

void solve_torus(const TorusArgs& a, Report& rep) {
  const PlaneFunction v = parse_plane_function(a.v);
  const Eigen::VectorXd grid = grid_from(a.grid);
  const OperatorConfig cfg = a.common.config();
  auto& s = rep.scenario();
  s["v"] = a.v;
  s["offset"] = a.offset;
  s["grid"] = a.grid;
  a.common.echo(s);

  const TorusFlow torus;
  const SolutionProfile p = torus_solve(v, a.offset, grid, cfg, torus);
  rep.metric("residual_sup", p.residual_sup);
  rep.metric("truncation", p.truncation);
  rep.check("residual_sup", p.residual_sup, a.tol_residual);
  if (p.periodicity_defect) {
    rep.metric("periodicity_defect", *p.periodicity_defect);
    rep.check("periodicity_defect", *p.periodicity_defect, a.tol_periodicity);
  }

  Eigen::VectorXd xs(grid.size()), ys(grid.size()), vv(grid.size());
  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    const Eigen::Vector2d pt = torus.point(grid[k], a.offset);
    xs[k] = pt.x();
    ys[k] = pt.y();
    vv[k] = v(pt.x(), pt.y());
  }
  const Stems st = stems(a.common, "solve-torus");
  write_csv(st.file(".csv"), {{"t", "x", "y", "u", "v"}, {grid, xs, ys, p.values, vv}});
  rep.output(st.file(".csv"));
}

// -------------------------------------------------------------- solve-spiral

struct SpiralArgs {
  Common common;
  std::string v;
  double s = 0.0;
  std::string grid = "-20:20:2001";
  double tol_residual = 1e-6;
};

void solve_spiral(const SpiralArgs& a, Report& rep) {
  const AnnulusFunction v = parse_annulus_function(a.v);
  const Eigen::VectorXd grid = grid_from(a.grid);
  const OperatorConfig cfg = a.common.config();
  auto& sc = rep.scenario();
  sc["v"] = a.v;
  sc["s"] = a.s;
  sc["grid"] = a.grid;
  a.common.echo(sc);

  const SolutionProfile p = spiral_solve(v, a.s, grid, cfg);
  rep.metric("residual_sup", p.residual_sup);
  rep.metric("truncation", p.truncation);
  rep.check("residual_sup", p.residual_sup, a.tol_residual);
  const double lo = grid[0];
  const double hi = grid[grid.size() - 1];
  rep.metric("inner_gap_at_first_angle", lo < 0.0 ? asymptotic_gap(v, a.s, lo, cfg) : kNaN);
  rep.metric("outer_gap_at_last_angle", hi > 0.0 ? asymptotic_gap(v, a.s, hi, cfg) : kNaN);

  const Eigen::Index n = grid.size();
  Eigen::VectorXd r(n), xs(n), ys(n), vv(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    r[k] = spiral_radius(grid[k], a.s);
    const Eigen::Vector2d pt = chart_to_cartesian(grid[k], a.s);
    xs[k] = pt.x();
    ys[k] = pt.y();
    vv[k] = v(r[k], grid[k]);
  }
  const Stems st = stems(a.common, "solve-spiral");
  write_csv(st.file(".csv"), {{"theta", "r", "x", "y", "u", "v"}, {grid, r, xs, ys, p.values, vv}});
  rep.output(st.file(".csv"));
}

// ------------------------------------------------------------- solve-annulus

struct AnnulusArgs {
  Common common;
  std::string v;
  std::string s_grid = "-1:1:5";
  std::string grid = "-10:10:1001";
  double tol_residual = 1e-6;
};

void solve_annulus(const AnnulusArgs& a, Report& rep) {
  const AnnulusFunction v = parse_annulus_function(a.v);
  const Eigen::VectorXd grid = grid_from(a.grid);
  const Eigen::VectorXd labels = grid_from(a.s_grid);
  const OperatorConfig cfg = a.common.config();
  auto& sc = rep.scenario();
  sc["v"] = a.v;
  sc["s_grid"] = a.s_grid;
  sc["grid"] = a.grid;
  a.common.echo(sc);

  const std::vector<double> s_samples(labels.data(), labels.data() + labels.size());
  const AnnulusSection sec = annulus_bundle_solve(v, s_samples, grid, cfg);

  std::vector<const LeafSection*> leaves;
  for (const auto& l : sec.spirals) leaves.push_back(&l);
  leaves.push_back(&sec.inner);
  leaves.push_back(&sec.outer);

  const Stems st = stems(a.common, "solve-annulus");
  const auto n = static_cast<Eigen::Index>(leaves.size());
  Eigen::VectorXd index(n), s_col(n), radius(n), residual(n);
  double worst = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const LeafSection& l = *leaves[static_cast<std::size_t>(k)];
    index[k] = static_cast<double>(k);
    s_col[k] = l.s;
    radius[k] = std::isnan(l.s) ? (k == n - 2 ? 1.0 : 2.0) : kNaN;
    residual[k] = l.profile.residual_sup;
    worst = std::max(worst, l.profile.residual_sup);
    std::ostringstream file;
    file << ".leaf" << std::setw(3) << std::setfill('0') << k << ".csv";
    write_csv(st.file(file.str()), {{"theta", "u"}, {l.profile.grid, l.profile.values}});
    rep.output(st.file(file.str()));
  }
  write_csv(st.file(".index.csv"), {{"leaf", "s", "radius", "residual_sup"}, {index, s_col, radius, residual}});
  rep.output(st.file(".index.csv"));

  double max_delta = 0.0;
  for (double d : sec.neighbour_deltas) max_delta = std::max(max_delta, d);
  rep.metric("residual_sup", worst);
  rep.metric("max_neighbour_delta", max_delta);
  rep.metric("lipschitz_estimate", sec.lipschitz_estimate);
  json inner = json::array(), outer = json::array();
  for (double g : sec.inner_gaps) inner.push_back(number(g));
  for (double g : sec.outer_gaps) outer.push_back(number(g));
  rep.metrics()["inner_gaps"] = inner;
  rep.metrics()["outer_gaps"] = outer;
  rep.check("residual_sup", worst, a.tol_residual);
}

// ---------------------------------------------------------------- solve-flow

struct FlowArgs {
  Common common;
  std::string field = "translation";
  std::string v = "sin:a=1";
  std::string box;
  double hole = 0.5;
  std::string grid = "-2:2:41";
  double y = 0.1;
  std::optional<double> probe_x;
  double flow_step = 1e-3;
  double residual_step = 1e-3;
  int orders = 2;
  double fd_step = 1e-4;
  double tol_residual = 1e-6;
  double tol_derivative = 1e-5;
  double order_lo = 1.7;
  double order_hi = 2.3;
};

void solve_flow_cmd(const FlowArgs& a, Report& rep) {
  const OperatorConfig cfg = a.common.config();
  auto& sc = rep.scenario();
  sc["field"] = a.field;
  sc["v"] = a.v;
  sc["grid"] = a.grid;
  sc["y"] = a.y;
  sc["flow_step"] = a.flow_step;
  a.common.echo(sc);

  std::string box = a.box;
  if (box.empty()) box = a.field == "rotation" ? "-3,-3:3,3" : "-40,-5:10,5";
  const auto colon = box.find(':');
  if (colon == std::string::npos) throw SpecError("box must be lo0,lo1:hi0,hi1");
  const WorkingRegion region = WorkingRegion::box(vector_from(box.substr(0, colon)),
                                                  vector_from(box.substr(colon + 1)));
  if (region.dimension() != 2) throw SpecError("solve-flow works in the plane; box needs 2 coordinates");
  sc["box"] = box;

  std::optional<FlowField> field;
  if (a.field == "translation") {
    field = FlowField::translation(region, 0, a.flow_step);
  } else if (a.field == "rotation") {
    sc["hole"] = a.hole;
    field = FlowField::rotation(region, a.hole, a.flow_step);
  } else {
    throw SpecError("unknown field '" + a.field + "' (translation or rotation)");
  }
  const FlowMap flow(*field);
  const ScalarField v = parse_scalar_field(a.v, 2);

  const Eigen::VectorXd xs = grid_from(a.grid);
  const Eigen::Index n = xs.size();
  Eigen::VectorXd ys = Eigen::VectorXd::Constant(n, a.y), u(n), vv(n), res(n);
  double worst = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Vector2d x(xs[k], a.y);
    u[k] = solve_field(flow, v, x, cfg);
    vv[k] = v(x);
    res[k] = field_residual(flow, v, x, a.residual_step, cfg);
    worst = std::max(worst, res[k]);
  }
  rep.metric("residual_sup", worst);
  rep.check("residual_sup", worst, a.tol_residual);

  const Eigen::Vector2d probe(a.probe_x.value_or(xs[n / 2]), a.y);
  sc["probe_x"] = probe.x();
  const SmoothnessReport sm = smoothness_order_check(flow, v, probe, 0, a.orders, cfg);
  const double h = a.fd_step;
  const Eigen::Vector2d e0(1.0, 0.0);
  const double u0 = solve_field(flow, v, probe, cfg);
  const double up = solve_field(flow, v, probe + h * e0, cfg);
  const double um = solve_field(flow, v, probe - h * e0, cfg);
  for (const auto& oc : sm.orders) {
    const std::string tag = "order" + std::to_string(oc.order);
    rep.metric(tag + "_analytic", oc.analytic);
    rep.metric(tag + "_estimated_order", oc.estimated_order);
    if (oc.order <= 2) {
      const double fd = oc.order == 1 ? (up - um) / (2.0 * h) : (up - 2.0 * u0 + um) / (h * h);
      rep.check(tag + "_fd_agreement", std::abs(fd - oc.analytic), a.tol_derivative);
    }
    if (oc.exact || oc.noise_floor) {
      rep.check_flag(tag + "_convergence_order", true,
                     oc.exact ? "discrepancy at rounding level" : "discrepancy at noise floor");
    } else {
      const bool ok = oc.estimated_order >= a.order_lo && oc.estimated_order <= a.order_hi;
      std::ostringstream d;
      d << "estimate " << oc.estimated_order << " in [" << a.order_lo << ", " << a.order_hi << "]";
      rep.check_flag(tag + "_convergence_order", ok, d.str());
    }
  }

  const Stems st = stems(a.common, "solve-flow");
  write_csv(st.file(".csv"), {{"x", "y", "u", "v", "residual"}, {xs, ys, u, vv, res}});
  rep.output(st.file(".csv"));
}

// ------------------------------------------------------------- singular-line

struct SingularArgs {
  Common common;
  std::string v;
  std::string grid = "-50:50:10001";
  double tol_ratio = 3.0 + 1e-6;
  double tol_gap = 1e-6;
  double tol_residual = 1e-6;
};

void singular_line(const SingularArgs& a, Report& rep) {
  const LeafFunction v = parse_leaf_function(a.v);
  const Eigen::VectorXd grid = grid_from(a.grid);
  auto& sc = rep.scenario();
  sc["v"] = a.v;
  sc["grid"] = a.grid;
  sc["quad_step"] = a.common.step;
  SingularConfig cfg;
  cfg.quad_step = a.common.step;

  const PiecewiseSolution sol = singular_line_solve(v, grid, cfg);
  const double sup = sol.values.cwiseAbs().maxCoeff();
  const double res = singular_line_residual(sol, v);
  rep.metric("sup_u", sup);
  rep.metric("sup_u_over_bound", sup / v.bound());
  rep.metric("gap_zero", sol.gap_zero);
  rep.metric("gap_plus_one", sol.gap_plus_one);
  rep.metric("gap_minus_one", sol.gap_minus_one);
  rep.metric("residual_sup", res);
  rep.metric("u_at_plus_1e-6", singular_line_value(v, 1e-6, cfg));
  rep.metric("u_at_minus_1e-6", singular_line_value(v, -1e-6, cfg));
  rep.check("sup_u_over_bound", sup / v.bound(), a.tol_ratio);
  rep.check("gap_zero", sol.gap_zero, a.tol_gap);
  rep.check("gap_plus_one", sol.gap_plus_one, a.tol_gap);
  rep.check("gap_minus_one", sol.gap_minus_one, a.tol_gap);
  rep.check("residual_sup", res, a.tol_residual);

  const Stems st = stems(a.common, "singular-line");
  Eigen::VectorXd branch(grid.size());
  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    const double x = sol.grid[k];
    branch[k] = x >= 1.0 ? 2.0 : x >= 0.0 ? 1.0 : x > -1.0 ? 3.0 : 4.0;
  }
  write_csv(st.file(".csv"), {{"x", "u", "branch"}, {sol.grid, sol.values, branch}});
  rep.output(st.file(".csv"));
}

// -------------------------------------------------------- circle-obstruction

struct ObstructionArgs {
  Common common;
  std::string v;
  double kappa = 0.0;
  std::string cutoffs = "1e-2,1e-3,1e-4";
  double tol_slope = 0.2;
  double tol_defect = 1e-12;
  bool expect_periodic = false;
};

void circle_obstruction_cmd(const ObstructionArgs& a, Report& rep) {
  const LeafFunction v = parse_leaf_function(a.v);
  ObstructionConfig cfg;
  cfg.kappa = a.kappa;
  cfg.cutoffs = number_list(a.cutoffs);
  auto& sc = rep.scenario();
  sc["v"] = a.v;
  sc["kappa"] = a.kappa;
  sc["cutoffs"] = a.cutoffs;
  sc["expect_periodic"] = a.expect_periodic;

  const ObstructionReport r = circle_obstruction(v, cfg);
  rep.metrics()["divergent"] = r.divergent;
  rep.metric("defect", r.defect);
  rep.metric("multiplier", r.multiplier);
  rep.metric("measured_slope", r.measured_slope);
  rep.metric("predicted_slope", r.predicted_slope);
  if (r.divergent) {
    const double rel = std::abs(r.measured_slope - r.predicted_slope) / std::abs(r.predicted_slope);
    rep.metric("slope_relative_error", rel);
    rep.check("slope_relative_error", rel, a.tol_slope);
  }
  if (a.expect_periodic) rep.check("defect", r.defect, a.tol_defect);

  const Stems st = stems(a.common, "circle-obstruction");
  const auto m = static_cast<Eigen::Index>(r.cutoffs.size());
  write_csv(st.file(".csv"),
            {{"eta", "upper_arc", "lower_arc"},
             {Eigen::Map<const Eigen::VectorXd>(r.cutoffs.data(), m),
              Eigen::Map<const Eigen::VectorXd>(r.upper_arc.data(), m),
              Eigen::Map<const Eigen::VectorXd>(r.lower_arc.data(), m)}});
  rep.output(st.file(".csv"));
  const Eigen::Index nu = r.upper_solution.grid.size();
  const Eigen::Index nl = r.lower_solution.grid.size();
  Eigen::VectorXd theta(nu + nl), u(nu + nl), arc(nu + nl);
  theta << r.upper_solution.grid, r.lower_solution.grid;
  u << r.upper_solution.values, r.lower_solution.values;
  arc << Eigen::VectorXd::Zero(nu), Eigen::VectorXd::Ones(nl);
  write_csv(st.file(".arcs.csv"), {{"theta", "u", "arc"}, {theta, u, arc}});
  rep.output(st.file(".arcs.csv"));
}

// --------------------------------------------------------------- bundle-glue

struct GlueArgs {
  Common common;
  std::string cover_file;
  std::string preset;
  std::string v;
  std::string heights = "0,0.25,0.5";
  Eigen::Index points = 201;
  double tol_cocycle = 1e-12;
  double tol_mismatch = 2e-9;
  double tol_periodicity = 2e-9;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void bundle_glue(const GlueArgs& a, Report& rep) {
  if (a.cover_file.empty() == a.preset.empty()) {
    throw SpecError("bundle-glue needs exactly one of --cover or --preset");
  }
  GlueConfig cfg;
  cfg.op = a.common.config();
  cfg.points_per_box = a.points;
  auto& sc = rep.scenario();
  sc["cover"] = a.cover_file.empty() ? json(nullptr) : json(a.cover_file);
  sc["preset"] = a.preset.empty() ? json(nullptr) : json(a.preset);
  sc["v"] = a.v;
  sc["points_per_box"] = a.points;
  a.common.echo(sc);

  BundleCover cover;
  GluedSection section;
  if (!a.cover_file.empty()) {
    const CoverDocument doc = parse_cover(read_file(a.cover_file));
    cover = doc.cover;
    std::map<std::string, LeafFunction> data;
    for (const auto& [id, spec] : doc.data) data.emplace(id, parse_leaf_function(spec));
    if (!a.v.empty()) {
      for (const auto& b : cover.boxes()) data.emplace(b.id, parse_leaf_function(a.v));
    }
    const CocycleReport cr = verify_cocycle(cover);
    rep.metric("cocycle_deviation", cr.max_deviation());
    rep.check("cocycle_deviation", cr.max_deviation(), a.tol_cocycle);
    section = glue_general(cover, data, cfg);
  } else {
    if (a.v.empty()) throw SpecError("--preset needs --v");
    if (a.preset == "circle") {
      cover = circle_cover();
      section = circle_bundle_solve(parse_leaf_function(a.v), cfg);
    } else if (a.preset == "torus") {
      cover = torus_cover();
      sc["heights"] = a.heights;
      section = torus_bundle_solve(parse_plane_function(a.v), number_list(a.heights), cfg);
    } else {
      throw SpecError("unknown preset '" + a.preset + "' (circle or torus)");
    }
    const CocycleReport cr = verify_cocycle(cover);
    rep.metric("cocycle_deviation", cr.max_deviation());
    rep.check("cocycle_deviation", cr.max_deviation(), a.tol_cocycle);
  }

  rep.metric("max_mismatch", section.max_mismatch());
  rep.check("max_mismatch", section.max_mismatch(), a.tol_mismatch);
  if (section.periodicity_defect) {
    rep.metric("periodicity_defect", *section.periodicity_defect);
    rep.check("periodicity_defect", *section.periodicity_defect, a.tol_periodicity);
  }
  json boxes = json::array();
  Eigen::Index rows = 0;
  for (const auto& b : section.boxes) {
    boxes.push_back(b.id);
    rows += b.grid.size();
  }
  rep.metrics()["boxes"] = boxes;

  Eigen::VectorXd idx(rows), t(rows), trivial(rows), local(rows);
  Eigen::Index at = 0;
  for (std::size_t k = 0; k < section.boxes.size(); ++k) {
    const auto& b = section.boxes[k];
    const Eigen::Index m = b.grid.size();
    idx.segment(at, m).setConstant(static_cast<double>(k));
    t.segment(at, m) = b.grid;
    trivial.segment(at, m) = b.trivial;
    local.segment(at, m) = b.local;
    at += m;
  }
  const Stems st = stems(a.common, "bundle-glue");
  write_csv(st.file(".csv"), {{"box", "t", "trivial", "local"}, {idx, t, trivial, local}});
  rep.output(st.file(".csv"));
}

// -------------------------------------------------------------------- verify

struct VerifyArgs {
  Common common;
  std::string suite = "all";
};

void verify(const VerifyArgs& a, Report& rep, std::ostream& out) {
  rep.scenario()["suite"] = a.suite;
  const auto results = run_suite(a.suite);
  json failing = json::array();
  for (const auto& r : results) {
    rep.check_flag(r.name, r.pass, r.detail);
    if (!r.pass) failing.push_back(r.name);
  }
  rep.metrics()["invariants"] = results.size();
  rep.metrics()["failing"] = failing;
  if (!failing.empty()) {
    out << "failing invariants:";
    for (const auto& f : failing) out << ' ' << f.get<std::string>();
    out << '\n';
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Damped transport solver along leaves of one-dimensional foliations", "foliate"};
  app.require_subcommand(1, 1);

  std::function<void(Report&)> action;
  std::string chosen;
  Common* common = nullptr;

  LineArgs line;
  auto* s_line = app.add_subcommand("solve-line", "Solve u + u' = v on the real line");
  add_common(s_line, line.common);
  s_line->add_option("--v", line.v, "Leaf function spec")->required();
  s_line->add_option("--grid", line.grid, "lo:hi:count")->capture_default_str();
  s_line->add_flag("--periodic", line.periodic, "Use the periodic reduction (grid in [0, P))");
  s_line->add_option("--coefficient", line.coefficient, "Solve u + A u' = v with this A");
  s_line->add_option("--tol-residual", line.tol_residual)->capture_default_str();
  s_line->add_option("--tol-periodicity", line.tol_periodicity)->capture_default_str();
  s_line->callback([&] {
    common = &line.common;
    action = [&](Report& r) { solve_line(line, r); };
  });

  TorusArgs torus;
  auto* s_torus = app.add_subcommand("solve-torus", "Solve along a leaf of the irrational torus flow");
  add_common(s_torus, torus.common);
  s_torus->add_option("--v", torus.v, "Torus function spec")->required();
  s_torus->add_option("--offset", torus.offset, "Leaf offset c in y = slope x + c")->capture_default_str();
  s_torus->add_option("--grid", torus.grid, "Leaf parameter lo:hi:count")->capture_default_str();
  s_torus->add_option("--tol-residual", torus.tol_residual)->capture_default_str();
  s_torus->add_option("--tol-periodicity", torus.tol_periodicity)->capture_default_str();
  s_torus->callback([&] {
    common = &torus.common;
    action = [&](Report& r) { solve_torus(torus, r); };
  });

  SpiralArgs spiral;
  auto* s_spiral = app.add_subcommand("solve-spiral", "Solve along one spiral leaf of the annulus");
  add_common(s_spiral, spiral.common);
  s_spiral->add_option("--v", spiral.v, "Annulus function spec")->required();
  s_spiral->add_option("--s", spiral.s, "Spiral label")->capture_default_str();
  s_spiral->add_option("--grid", spiral.grid, "Angle lo:hi:count")->capture_default_str();
  s_spiral->add_option("--tol-residual", spiral.tol_residual)->capture_default_str();
  s_spiral->callback([&] {
    common = &spiral.common;
    action = [&](Report& r) { solve_spiral(spiral, r); };
  });

  AnnulusArgs annulus;
  auto* s_annulus = app.add_subcommand("solve-annulus", "Solve on spirals and both boundary circles");
  add_common(s_annulus, annulus.common);
  s_annulus->add_option("--v", annulus.v, "Annulus function spec")->required();
  s_annulus->add_option("--s-grid", annulus.s_grid, "Spiral labels lo:hi:count")->capture_default_str();
  s_annulus->add_option("--grid", annulus.grid, "Angle lo:hi:count")->capture_default_str();
  s_annulus->add_option("--tol-residual", annulus.tol_residual)->capture_default_str();
  s_annulus->callback([&] {
    common = &annulus.common;
    action = [&](Report& r) { solve_annulus(annulus, r); };
  });

  FlowArgs flow;
  auto* s_flow = app.add_subcommand("solve-flow", "Solve U + XU = V for a planar flow");
  add_common(s_flow, flow.common);
  s_flow->add_option("--field", flow.field, "translation or rotation")->capture_default_str();
  s_flow->add_option("--v", flow.v, "Ridge field spec")->capture_default_str();
  s_flow->add_option("--box", flow.box, "Working box lo0,lo1:hi0,hi1");
  s_flow->add_option("--hole", flow.hole, "Excluded radius around the rotation centre")->capture_default_str();
  s_flow->add_option("--grid", flow.grid, "x lo:hi:count")->capture_default_str();
  s_flow->add_option("--y", flow.y, "Fixed y of the sample row")->capture_default_str();
  s_flow->add_option("--probe-x", flow.probe_x, "x of the derivative check (default: grid midpoint)");
  s_flow->add_option("--flow-step", flow.flow_step, "RK4 step")->capture_default_str();
  s_flow->add_option("--orders", flow.orders, "Derivative orders checked (1-3)")->capture_default_str();
  s_flow->add_option("--tol-residual", flow.tol_residual)->capture_default_str();
  s_flow->add_option("--tol-derivative", flow.tol_derivative)->capture_default_str();
  s_flow->callback([&] {
    common = &flow.common;
    action = [&](Report& r) { solve_flow_cmd(flow, r); };
  });

  SingularArgs sing;
  auto* s_sing = app.add_subcommand("singular-line", "Piecewise solution for the field phi(x) d/dx");
  add_common(s_sing, sing.common);
  s_sing->add_option("--v", sing.v, "Leaf function spec")->required();
  s_sing->add_option("--grid", sing.grid, "lo:hi:count, must hit -1, 0 and 1")->capture_default_str();
  s_sing->add_option("--tol-ratio", sing.tol_ratio, "Limit on sup|u| / sup|v|")->capture_default_str();
  s_sing->add_option("--tol-gap", sing.tol_gap)->capture_default_str();
  s_sing->add_option("--tol-residual", sing.tol_residual)->capture_default_str();
  s_sing->callback([&] {
    common = &sing.common;
    action = [&](Report& r) { singular_line(sing, r); };
  });

  ObstructionArgs obs;
  auto* s_obs = app.add_subcommand("circle-obstruction", "Arc integrals for sin(theta) d/dtheta");
  add_common(s_obs, obs.common);
  s_obs->add_option("--v", obs.v, "2 pi periodic leaf function spec")->required();
  s_obs->add_option("--kappa", obs.kappa, "Weight exponent")->capture_default_str();
  s_obs->add_option("--cutoffs", obs.cutoffs, "Comma-separated decreasing cutoffs")->capture_default_str();
  s_obs->add_option("--tol-slope", obs.tol_slope)->capture_default_str();
  s_obs->add_option("--tol-defect", obs.tol_defect)->capture_default_str();
  s_obs->add_flag("--expect-periodic", obs.expect_periodic, "Require the defect below --tol-defect");
  s_obs->callback([&] {
    common = &obs.common;
    action = [&](Report& r) { circle_obstruction_cmd(obs, r); };
  });

  GlueArgs glue;
  auto* s_glue = app.add_subcommand("bundle-glue", "Glue box solutions over a cover");
  add_common(s_glue, glue.common);
  s_glue->add_option("--cover", glue.cover_file, "Cover description file");
  s_glue->add_option("--preset", glue.preset, "circle or torus");
  s_glue->add_option("--v", glue.v, "Function spec (fills boxes without data)");
  s_glue->add_option("--heights", glue.heights, "Torus leaf heights")->capture_default_str();
  s_glue->add_option("--points", glue.points, "Grid points per box")->capture_default_str();
  s_glue->add_option("--tol-cocycle", glue.tol_cocycle)->capture_default_str();
  s_glue->add_option("--tol-mismatch", glue.tol_mismatch)->capture_default_str();
  s_glue->add_option("--tol-periodicity", glue.tol_periodicity)->capture_default_str();
  s_glue->callback([&] {
    common = &glue.common;
    action = [&](Report& r) { bundle_glue(glue, r); };
  });

  VerifyArgs ver;
  auto* s_ver = app.add_subcommand("verify", "Run the invariant batteries");
  add_common(s_ver, ver.common);
  s_ver->add_option("--suite", ver.suite, "all, operator, geometry, flow, singular, bundle or cli")
      ->capture_default_str();
  s_ver->callback([&] {
    common = &ver.common;
    action = [&](Report& r) { verify(ver, r, out); };
  });

  for (auto* sub : {s_line, s_torus, s_spiral, s_annulus, s_flow, s_sing, s_obs, s_glue, s_ver}) {
    sub->parse_complete_callback([&chosen, sub] { chosen = sub->get_name(); });
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    if (!chosen.empty()) {
      err << app.get_subcommand(chosen)->help();
    } else {
      err << app.help();
    }
    return kExitUsage;
  }

  const auto start = std::chrono::steady_clock::now();
  Report report(chosen);
  try {
    action(report);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const Stems st = stems(*common, chosen);
    report.write(st.file(".report.json"), seconds, out);
  } catch (const SpecError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return report.pass() ? kExitPass : kExitFail;
}

}  // namespace foliate::cli
