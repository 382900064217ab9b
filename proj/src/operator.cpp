#include "foliate/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "foliate/errors.hpp"
#include "foliate/finite_difference.hpp"

namespace foliate {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double residual_or_nan(const Eigen::VectorXd& grid, const Eigen::VectorXd& values,
                       const ScalarFn& v) {
  return grid.size() < 3 ? kNaN : ode_residual(grid, values, v);
}

bool any_clamped(const LeafFunction& v, const Eigen::VectorXd& grid, double span) {
  const auto d = v.domain();
  if (!d) return false;
  return grid.minCoeff() - span < d->first || grid.maxCoeff() > d->second;
}

}  // namespace

void OperatorConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be > 0");
  if (!(quad_step > 0.0) || !std::isfinite(quad_step)) {
    throw ConfigError("quadrature step must be > 0");
  }
  if (!(margin >= 0.0) || !std::isfinite(margin)) throw ConfigError("margin must be >= 0");
  if (truncation && (!(*truncation > 0.0) || !std::isfinite(*truncation))) {
    throw ConfigError("truncation must be > 0");
  }
}

double OperatorConfig::truncation_for(double bound) const {
  validate();
  double depth = 0.0;
  if (truncation) {
    depth = *truncation;
  } else {
    const double base = bound > 0.0 ? std::max(truncation_bound(bound, epsilon), 0.0) : 0.0;
    depth = base + margin;
  }
  if (!(quad_step < depth)) {
    throw ConfigError("quadrature step " + std::to_string(quad_step) +
                      " must be below the truncation depth " + std::to_string(depth));
  }
  return depth;
}

double truncation_bound(double bound, double epsilon) {
  if (!(bound > 0.0) || !(epsilon > 0.0)) {
    throw DomainError("truncation bound needs M > 0 and epsilon > 0");
  }
  return std::log(4.0 * bound / epsilon);
}

LineOperator::LineOperator(double bound, const OperatorConfig& cfg)
    : kernel_(cfg.truncation_for(bound), cfg.quad_step) {}

PeriodicOperator::PeriodicOperator(double period, const OperatorConfig& cfg)
    : kernel_((cfg.validate(), DampedKernel<double>::periodic(period, cfg.quad_step))) {}

SolutionProfile solve_on_line(const ScalarFn& v, double bound,
                              const Eigen::Ref<const Eigen::VectorXd>& grid,
                              const OperatorConfig& cfg) {
  validate_grid(grid);
  const LineOperator op(bound, cfg);
  SolutionProfile out;
  out.grid = grid;
  out.config = cfg;
  out.truncation = op.truncation();
  out.values.resize(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) out.values[i] = op(v, grid[i]);
  out.residual_sup = residual_or_nan(out.grid, out.values, v);
  return out;
}

SolutionProfile solve_on_line(const LeafFunction& v, const Eigen::Ref<const Eigen::VectorXd>& grid,
                              const OperatorConfig& cfg) {
  SolutionProfile out = solve_on_line(ScalarFn(v), v.bound(), grid, cfg);
  out.clamped = any_clamped(v, out.grid, out.truncation);
  return out;
}

SolutionProfile solve_periodic(const ScalarFn& v, double period,
                               const Eigen::Ref<const Eigen::VectorXd>& theta_grid,
                               const OperatorConfig& cfg) {
  validate_grid(theta_grid);
  if (theta_grid.minCoeff() < 0.0 || theta_grid.maxCoeff() >= period) {
    throw ConfigError("periodic grid must lie in [0, P)");
  }
  const PeriodicOperator op(period, cfg);
  SolutionProfile out;
  out.grid = theta_grid;
  out.config = cfg;
  out.truncation = period;
  out.values.resize(theta_grid.size());
  for (Eigen::Index i = 0; i < theta_grid.size(); ++i) out.values[i] = op(v, theta_grid[i]);
  out.residual_sup = residual_or_nan(out.grid, out.values, v);
  // The reduction is exactly periodic; measure it anyway.
  double defect = 0.0;
  for (Eigen::Index i = 0; i < theta_grid.size(); ++i) {
    defect = std::max(defect, std::abs(op(v, theta_grid[i] + period) - out.values[i]));
  }
  out.periodicity_defect = defect;
  return out;
}

SolutionProfile solve_periodic(const LeafFunction& v,
                               const Eigen::Ref<const Eigen::VectorXd>& theta_grid,
                               const OperatorConfig& cfg) {
  const auto p = v.period();
  if (!p) throw KindError("solve_periodic needs a periodic input, got " + v.describe());
  return solve_periodic(ScalarFn(v), *p, theta_grid, cfg);
}

SolutionProfile solve_periodic(const LeafFunction& v, double period,
                               const Eigen::Ref<const Eigen::VectorXd>& theta_grid,
                               const OperatorConfig& cfg) {
  if (!v.has_period(period)) {
    throw KindError("input " + v.describe() + " is not periodic with period " +
                    std::to_string(period));
  }
  return solve_periodic(ScalarFn(v), period, theta_grid, cfg);
}

SolutionProfile solve_with_coefficient(const LeafFunction& v, const LeafFunction& a,
                                       const Eigen::Ref<const Eigen::VectorXd>& grid,
                                       const OperatorConfig& cfg, double floor) {
  validate_grid(grid);
  if (!(floor > 0.0)) throw ConfigError("coefficient floor must be > 0");
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    if (!(a(grid[i]) >= floor)) {
      throw SingularCoefficientError("coefficient " + std::to_string(a(grid[i])) + " at x = " +
                                     std::to_string(grid[i]) + " is below the floor " +
                                     std::to_string(floor));
    }
  }
  const LineOperator op(v.bound(), cfg);
  SolutionProfile out;
  out.grid = grid;
  out.config = cfg;
  out.truncation = op.truncation();
  out.clamped = any_clamped(v, out.grid, out.truncation);
  out.values.resize(grid.size());
  Eigen::VectorXd weighted(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    weighted[i] = op(v, grid[i]);
    out.values[i] = weighted[i] / a(grid[i]);
  }
  // (A U) solves the plain equation.
  out.residual_sup = residual_or_nan(out.grid, weighted, ScalarFn(v));

  const auto pv = v.period();
  const auto pa = a.period();
  const bool a_constant = std::holds_alternative<LeafFunction::Constant>(a.kind());
  if (pv && ((pa && *pa == *pv) || a_constant)) {
    const double p = *pv;
    double defect = 0.0;
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      const double x = grid[i] + p;
      defect = std::max(defect, std::abs(op(v, x) / a(x) - out.values[i]));
    }
    out.periodicity_defect = defect;
  }
  return out;
}

double ode_residual(const Eigen::Ref<const Eigen::VectorXd>& grid,
                    const Eigen::Ref<const Eigen::VectorXd>& values, const ScalarFn& v) {
  if (grid.size() < 3) throw DomainError("residual needs at least three grid points");
  if (grid.size() != values.size()) throw DomainError("grid and values differ in length");
  const int w = supported_half_width(grid.size());
  const Eigen::VectorXd du = central_derivative<double>(grid, values, w);
  double sup = 0.0;
  for (Eigen::Index i = w; i + w < grid.size(); ++i) {
    sup = std::max(sup, std::abs(values[i] + du[i] - v(grid[i])));
  }
  return sup;
}

double ode_residual(const SolutionProfile& profile, const ScalarFn& v) {
  return ode_residual(profile.grid, profile.values, v);
}

}  // namespace foliate
