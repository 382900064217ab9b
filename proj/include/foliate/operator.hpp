#pragma once

// Solution operator for u + u' = v on a single leaf:
//
//     u(x) = \int_0^\infty e^{-s} v(x - s) ds,
//
// truncated at depth L so that the discarded tail stays below epsilon / 2.

#include <Eigen/Core>

#include <functional>
#include <optional>

#include "foliate/leaf_function.hpp"
#include "foliate/quadrature.hpp"

namespace foliate {

using ScalarFn = std::function<double(double)>;

struct OperatorConfig {
  double epsilon = 1e-9;
  double quad_step = 1e-2;
  /// Explicit truncation depth; derived from the bound when empty.
  std::optional<double> truncation;
  double margin = 2.0;

  /// Throws ConfigError on a non-positive epsilon or step, or a negative margin.
  void validate() const;
  /// Truncation depth for an input bounded by M. Throws ConfigError when the
  /// depth does not exceed the quadrature step.
  double truncation_for(double bound) const;
};

/// ln(4 M / epsilon). Throws DomainError unless both arguments are positive.
double truncation_bound(double bound, double epsilon);

struct SolutionProfile {
  Eigen::VectorXd grid;
  Eigen::VectorXd values;
  OperatorConfig config;
  double truncation = 0.0;
  /// sup |u + u' - v| over interior grid points; NaN below three points.
  double residual_sup = 0.0;
  /// Some evaluation of v fell outside its domain and was clamped.
  bool clamped = false;
  /// max |U(x + P) - U(x)| when the inputs share a period P.
  std::optional<double> periodicity_defect;
};

/// Truncated line operator, reusable across grids and inputs with the same
/// bound.
class LineOperator {
 public:
  LineOperator(double bound, const OperatorConfig& cfg);

  template <typename F>
  double operator()(F&& v, double x) const {
    return kernel_.apply(std::forward<F>(v), x);
  }

  double truncation() const { return kernel_.span(); }
  const DampedKernel<double>& kernel() const { return kernel_; }

 private:
  DampedKernel<double> kernel_;
};

/// Geometric-series reduction for P-periodic input:
///     u(x) = (1 / (1 - e^{-P})) \int_0^P e^{-s} v(x - s) ds.
class PeriodicOperator {
 public:
  PeriodicOperator(double period, const OperatorConfig& cfg);

  template <typename F>
  double operator()(F&& v, double x) const {
    return kernel_.apply(std::forward<F>(v), x);
  }

  double period() const { return kernel_.span(); }

 private:
  DampedKernel<double> kernel_;
};

SolutionProfile solve_on_line(const LeafFunction& v, const Eigen::Ref<const Eigen::VectorXd>& grid,
                              const OperatorConfig& cfg);
/// Same for an arbitrary callable with a caller-certified bound.
SolutionProfile solve_on_line(const ScalarFn& v, double bound,
                              const Eigen::Ref<const Eigen::VectorXd>& grid,
                              const OperatorConfig& cfg);

/// Requires a periodic kind (KindError otherwise) and grid points in [0, P).
SolutionProfile solve_periodic(const LeafFunction& v,
                               const Eigen::Ref<const Eigen::VectorXd>& theta_grid,
                               const OperatorConfig& cfg);
/// Explicit period; constants are accepted for any period.
SolutionProfile solve_periodic(const LeafFunction& v, double period,
                               const Eigen::Ref<const Eigen::VectorXd>& theta_grid,
                               const OperatorConfig& cfg);
SolutionProfile solve_periodic(const ScalarFn& v, double period,
                               const Eigen::Ref<const Eigen::VectorXd>& theta_grid,
                               const OperatorConfig& cfg);

/// U = (1 / A(x)) e^{-x} \int_{-inf}^x e^t v(t) dt. Throws
/// SingularCoefficientError when A drops below `floor` on the grid.
SolutionProfile solve_with_coefficient(const LeafFunction& v, const LeafFunction& a,
                                       const Eigen::Ref<const Eigen::VectorXd>& grid,
                                       const OperatorConfig& cfg, double floor = 1e-6);

/// sup over interior points of |u + u' - v|, u' by a centred stencil on the
/// grid's own spacing (five points where available, else three). Throws
/// DomainError below three points.
double ode_residual(const Eigen::Ref<const Eigen::VectorXd>& grid,
                    const Eigen::Ref<const Eigen::VectorXd>& values, const ScalarFn& v);
double ode_residual(const SolutionProfile& profile, const ScalarFn& v);

}  // namespace foliate
