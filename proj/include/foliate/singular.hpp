#pragma once

// Vector fields with zeros. On the line the field phi(x) d/dx with
//
//     phi(x) = 1 (x >= 1),  x (-1 < x < 1),  -1 (x <= -1)
//
// admits the weighted equation phi(x) d/dx[x e^{|x|} u] = x e^{|x|} v, solved
// branch by branch. On the circle, sin(theta) d/dtheta[f u] = f v has no
// periodic solution, and the obstruction is measured on cut-off arcs.

#include <Eigen/Core>

#include <string>
#include <vector>

#include "foliate/leaf_function.hpp"

namespace foliate {

double phi(double x);

struct BranchProfile {
  std::string name;
  Eigen::VectorXd grid;
  Eigen::VectorXd values;
};

struct PiecewiseSolution {
  /// u1 on [0, 1], u2 on [1, x_max], u3 on [-1, 0], u4 on [x_min, -1].
  BranchProfile u1, u2, u3, u4;
  /// Whole grid in ascending order; junction values come from u1 (0), u2 (1)
  /// and u4 (-1).
  Eigen::VectorXd grid;
  Eigen::VectorXd values;
  /// |u1(0) - u3(0)|, |u1(1) - u2(1)|, |u3(-1) - u4(-1)|
  double gap_zero = 0.0;
  double gap_plus_one = 0.0;
  double gap_minus_one = 0.0;

  double max_gap() const;
};

struct SingularConfig {
  /// Quadrature panel width.
  double quad_step = 1e-2;
};

/// Evaluates the four branch formulas on an ascending grid that contains 0,
/// -1 and 1 exactly (ConfigError otherwise). The x = 0 value is the limit
/// v(0). Near zero the branches use the mean-value form
/// e^{-x} mean_{[0,x]}(e^t v), which has no 0/0.
PiecewiseSolution singular_line_solve(const LeafFunction& v,
                                      const Eigen::Ref<const Eigen::VectorXd>& grid,
                                      const SingularConfig& cfg = {});

/// Single-point evaluation of the same branch formulas.
double singular_line_value(const LeafFunction& v, double x, const SingularConfig& cfg = {});

/// sup over branch-interior points of |phi(x) ((x u)' + |x| u) - x v|, the
/// weighted equation divided by e^{|x|}. Derivatives use centred stencils that
/// stay inside one branch, so a neighbourhood of the junctions is excluded.
/// Throws DomainError when a branch has fewer than three points.
double singular_line_residual(const PiecewiseSolution& sol, const LeafFunction& v);

struct DivergenceSample {
  double x;
  double u;
};

struct NaiveAttempt {
  std::string name;
  std::vector<DivergenceSample> samples;
  /// max |u| over the samples
  double peak = 0.0;
};

/// The three rejected formulations for v = 1 on widening grids: ln x near
/// 0, x / 2 for large x, and 1 - 1/x + 1/(x e^x) for negative x.
std::vector<NaiveAttempt> naive_singular_demos();

struct ObstructionConfig {
  std::vector<double> cutoffs{1e-2, 1e-3, 1e-4};
  /// Weight f(theta) = e^{kappa theta}, so f(theta + 2 pi) = C f(theta) with
  /// C = e^{2 pi kappa}.
  double kappa = 0.0;
  double tolerance = 1e-13;
  /// Points per arc in the sampled arc solutions.
  Eigen::Index arc_points = 64;
};

struct ObstructionReport {
  std::vector<double> cutoffs;
  /// \int f v / sin over (eta, pi - eta) and (pi + eta, 2 pi - eta)
  std::vector<double> upper_arc;
  std::vector<double> lower_arc;
  double kappa = 0.0;
  double multiplier = 1.0;  // C
  /// Some arc integral does not settle as eta shrinks.
  bool divergent = false;
  /// (1/C) (upper + lower) at the finest cutoff; +inf when divergent.
  double defect = 0.0;
  /// Fitted d(upper arc)/d ln(eta) and the same slope for 2 ln cot(eta/2).
  double measured_slope = 0.0;
  double predicted_slope = 0.0;
  /// Arc solutions (1/f) \int_{mid}^theta f v / sin, anchored at the arc
  /// midpoints pi/2 and 3 pi/2, sampled inside the finest cutoff.
  BranchProfile upper_solution;
  BranchProfile lower_solution;
};

/// Throws KindError unless v has period 2 pi.
ObstructionReport circle_obstruction(const LeafFunction& v, const ObstructionConfig& cfg = {});

}  // namespace foliate
