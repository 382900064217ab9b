#include "foliate/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "foliate/errors.hpp"

namespace foliate {

namespace {

constexpr double kPi = std::numbers::pi;

double frac(double x) { return x - std::floor(x); }

ScalarFn torus_leaf(const PlaneFunction& v, double slope, double offset) {
  return [&v, slope, offset](double t) { return v(t, slope * t + offset); };
}

ScalarFn spiral_leaf(const AnnulusFunction& v, double s) {
  return [&v, s](double theta) { return v(spiral_radius(theta, s), theta); };
}

}  // namespace

PlaneFunction::PlaneFunction(Fn fn, double bound, std::optional<double> period_x,
                             std::optional<double> period_y, std::string label)
    : fn_(std::move(fn)),
      bound_(bound),
      period_x_(period_x),
      period_y_(period_y),
      label_(std::move(label)) {
  if (!fn_) throw DomainError("plane function is empty");
  if (!(bound_ >= 0.0) || !std::isfinite(bound_)) throw DomainError("bound must be finite and >= 0");
}

PlaneFunction PlaneFunction::constant(double c) {
  if (!std::isfinite(c)) throw DomainError("constant must be finite");
  return PlaneFunction([c](double, double) { return c; }, std::abs(c), 1.0, 1.0, "const");
}

PlaneFunction PlaneFunction::torus(double mean, std::vector<TorusTerm> terms) {
  double bound = std::abs(mean);
  for (const auto& t : terms) {
    if (!std::isfinite(t.coefficient)) throw DomainError("non-finite torus coefficient");
    bound += std::abs(t.coefficient);
  }
  auto fn = [mean, terms = std::move(terms)](double x, double y) {
    // Reduce first so that large arguments keep full phase accuracy.
    const double fx = frac(x);
    const double fy = frac(y);
    double s = mean;
    for (const auto& t : terms) {
      const double phase = 2.0 * kPi * frac(t.m * fx + t.n * fy);
      s += t.coefficient * (t.sine ? std::sin(phase) : std::cos(phase));
    }
    return s;
  };
  return PlaneFunction(std::move(fn), bound, 1.0, 1.0, "torus");
}

Eigen::Vector2d TorusFlow::point(double t, double offset) const {
  return {frac(t), frac(slope * t + offset)};
}

SolutionProfile torus_solve(const PlaneFunction& v, double offset,
                            const Eigen::Ref<const Eigen::VectorXd>& grid,
                            const OperatorConfig& cfg, const TorusFlow& torus) {
  if (!v.period_x() || *v.period_x() != 1.0) {
    throw KindError("torus input must be 1-periodic in x (" + v.label() + ")");
  }
  SolutionProfile out = solve_on_line(torus_leaf(v, torus.slope, offset), v.bound(), grid, cfg);
  // (x + 1, y) sits on the leaf offset - slope, reached at parameter x + 1.
  const LineOperator op(v.bound(), cfg);
  const ScalarFn shifted = torus_leaf(v, torus.slope, offset - torus.slope);
  double defect = 0.0;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    defect = std::max(defect, std::abs(op(shifted, grid[i] + 1.0) - out.values[i]));
  }
  out.periodicity_defect = defect;
  return out;
}

double spiral_radius(double theta, double s) { return 1.5 + std::atan(theta + s) / kPi; }

double spiral_radius_slope(double theta, double s) {
  const double z = theta + s;
  return 1.0 / (kPi * (1.0 + z * z));
}

Eigen::Vector2d chart_to_cartesian(double theta, double s) {
  const double r = spiral_radius(theta, s);
  return {r * std::cos(theta), r * std::sin(theta)};
}

ChartPoint cartesian_to_chart(double x, double y) {
  const double rho = std::hypot(x, y);
  if (!(rho > 1.0 && rho < 2.0)) {
    throw OutOfAnnulusError("point (" + std::to_string(x) + ", " + std::to_string(y) +
                            ") is not strictly inside the annulus");
  }
  const double tau = std::tan(kPi * (rho - 1.5));  // theta + s
  const double base = std::atan2(y, x);
  const double winding = std::round((tau - base) / (2.0 * kPi));
  const double theta = base + 2.0 * kPi * winding;
  return {theta, tau - theta};
}

Eigen::Vector2d induced_field_at(double x, double y) {
  const auto [theta, s] = cartesian_to_chart(x, y);
  const double r = spiral_radius(theta, s);
  const double dr = spiral_radius_slope(theta, s);
  const double c = std::cos(theta);
  const double sn = std::sin(theta);
  return {c * dr - r * sn, sn * dr + r * c};
}

AnnulusFunction::AnnulusFunction(std::vector<Term> terms) : terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (!std::isfinite(t.coefficient)) throw DomainError("non-finite annulus coefficient");
    if (t.degree < 0) throw DomainError("annulus term degree must be >= 0");
    if (t.harmonic < 0) throw DomainError("annulus harmonic must be >= 0");
  }
}

AnnulusFunction AnnulusFunction::constant(double c) {
  return AnnulusFunction({Term{c, 0, Mode::one, 0}});
}

double AnnulusFunction::operator()(double r, double theta) const {
  const double phase = std::remainder(theta, 2.0 * kPi);
  double s = 0.0;
  for (const auto& t : terms_) {
    double f = t.coefficient * std::pow(r, t.degree);
    if (t.mode == Mode::cosine) f *= std::cos(t.harmonic * phase);
    if (t.mode == Mode::sine) f *= std::sin(t.harmonic * phase);
    s += f;
  }
  return s;
}

double AnnulusFunction::bound() const {
  double m = 0.0;
  for (const auto& t : terms_) m += std::abs(t.coefficient) * std::pow(2.0, t.degree);
  return m;
}

SolutionProfile spiral_solve(const AnnulusFunction& v, double s,
                             const Eigen::Ref<const Eigen::VectorXd>& theta_grid,
                             const OperatorConfig& cfg) {
  return solve_on_line(spiral_leaf(v, s), v.bound(), theta_grid, cfg);
}

SolutionProfile circle_solve(const AnnulusFunction& v, double radius,
                             const Eigen::Ref<const Eigen::VectorXd>& theta_grid,
                             const OperatorConfig& cfg) {
  validate_grid(theta_grid);
  const ScalarFn leaf = [&v, radius](double theta) { return v(radius, theta); };
  const PeriodicOperator op(2.0 * kPi, cfg);
  SolutionProfile out;
  out.grid = theta_grid;
  out.config = cfg;
  out.truncation = op.period();
  out.values.resize(theta_grid.size());
  for (Eigen::Index i = 0; i < theta_grid.size(); ++i) out.values[i] = op(leaf, theta_grid[i]);
  out.residual_sup = theta_grid.size() < 3 ? std::nan("") : ode_residual(out, leaf);
  return out;
}

double asymptotic_gap(const AnnulusFunction& v, double s, double theta,
                      const OperatorConfig& cfg) {
  const double radius = theta <= 0.0 ? 1.0 : 2.0;
  const LineOperator line(v.bound(), cfg);
  const PeriodicOperator circle(2.0 * kPi, cfg);
  const double on_spiral = line(spiral_leaf(v, s), theta);
  const double on_circle = circle([&v, radius](double t) { return v(radius, t); }, theta);
  const double gap = std::abs(on_spiral - on_circle);
  if (!std::isfinite(gap)) throw EvaluationError("asymptotic gap is not finite", theta);
  return gap;
}

}  // namespace foliate
