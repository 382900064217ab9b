#pragma once

// Foliations given by a non-vanishing vector field X. Leaves are integral
// curves, Phi(x, t) is the flow map, and the solution of U + XU = V is
//
//     U(x) = \int_{-inf}^0 e^w V(Phi(x, w)) dw.

#include <Eigen/Core>

#include <map>
#include <memory>
#include <shared_mutex>
#include <vector>

#include "foliate/field.hpp"
#include "foliate/operator.hpp"

namespace foliate {

class FlowField {
 public:
  /// Checks |X| >= floor on a lattice of `lattice` points per axis over the
  /// region (points inside the excluded ball are skipped); throws DomainError
  /// otherwise.
  FlowField(std::vector<ScalarField> components, WorkingRegion region, double floor,
            double step = 1e-3, bool unit_speed = false, int lattice = 21);

  /// d/dx on R^n.
  static FlowField translation(WorkingRegion region, Eigen::Index axis = 0, double step = 1e-3);
  /// (-y, x) in the plane, with the origin cut out by a ball of `hole` radius.
  static FlowField rotation(WorkingRegion region, double hole, double step = 1e-3);

  Eigen::VectorXd operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  Eigen::Index dimension() const { return region_.dimension(); }
  const WorkingRegion& region() const { return region_; }
  double step() const { return step_; }
  double floor() const { return floor_; }
  bool unit_speed() const { return unit_speed_; }
  /// Smallest |X| seen by the construction check.
  double sampled_minimum() const { return sampled_min_; }

 private:
  std::vector<ScalarField> components_;
  WorkingRegion region_;
  double floor_;
  double step_;
  bool unit_speed_;
  double sampled_min_ = 0.0;
};

/// Classical RK4 flow map with an optional endpoint cache. The cache takes a
/// shared lock for lookups and an exclusive lock for insertion.
class FlowMap {
 public:
  explicit FlowMap(FlowField field, bool cache = true);

  /// Phi(x, t) with steps of size <= field.step(). Phi(x, 0) is x exactly.
  /// Throws EscapeError when the trajectory leaves the working region.
  Eigen::VectorXd flow(const Eigen::Ref<const Eigen::VectorXd>& x, double t) const;

  /// Phi(x, -s_j) for ascending depths s_j >= 0, one column per depth. Depths
  /// between steps are reached by a partial step from the last full step, so
  /// the full-step trajectory does not depend on the depth table.
  Eigen::MatrixXd trajectory_back(const Eigen::Ref<const Eigen::VectorXd>& x,
                                  const Eigen::Ref<const Eigen::ArrayXd>& depths) const;

  const FlowField& field() const { return field_; }
  std::size_t cache_size() const;

 private:
  Eigen::VectorXd rk4(const Eigen::VectorXd& x, double h, double sign) const;

  FlowField field_;
  bool use_cache_;
  mutable std::shared_mutex mutex_;
  mutable std::map<std::vector<double>, Eigen::VectorXd> cache_;
};

/// Truncated U(x) with L from the bound of V over the working region.
double solve_field(const FlowMap& flow, const ScalarField& v,
                   const Eigen::Ref<const Eigen::VectorXd>& x, const OperatorConfig& cfg);

/// d^order U / dx_axis^order by differentiating under the integral. The
/// derivatives of w -> Phi(x, w) along the axis come from a 7-point centred
/// difference of the flow with spacing `flow_step`; V is differentiated
/// exactly.
double solve_field_derivative(const FlowMap& flow, const ScalarField& v,
                              const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Index axis,
                              const OperatorConfig& cfg, int order = 1, double flow_step = 1e-2);

/// |(U(Phi(x, h)) - U(Phi(x, -h))) / 2h + U(x) - V(x)|
double field_residual(const FlowMap& flow, const ScalarField& v,
                      const Eigen::Ref<const Eigen::VectorXd>& x, double h,
                      const OperatorConfig& cfg);

struct OrderCheck {
  int order = 0;
  double analytic = 0.0;
  std::vector<double> steps;
  std::vector<double> finite_difference;
  std::vector<double> discrepancy;
  /// log2-type slope from the two finest steps; NaN when flagged.
  double estimated_order = 0.0;
  /// All discrepancies sit at rounding level, e.g. constant or linear V.
  bool exact = false;
  /// Discrepancy did not shrink under refinement.
  bool noise_floor = false;
};

struct SmoothnessReport {
  std::vector<OrderCheck> orders;
  double max_discrepancy = 0.0;
};

/// Compares solve_field_derivative with centred second-order differences of
/// solve_field for each order 1..max_order (max 3).
SmoothnessReport smoothness_order_check(const FlowMap& flow, const ScalarField& v,
                                        const Eigen::Ref<const Eigen::VectorXd>& x,
                                        Eigen::Index axis, int max_order,
                                        const OperatorConfig& cfg,
                                        std::vector<double> steps = {1e-3, 5e-4});

}  // namespace foliate
