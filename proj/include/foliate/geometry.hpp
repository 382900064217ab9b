#pragma once

// Concrete foliated geometries: straight-line leaves on the torus and the
// spiral foliation of the annulus 1 < r < 2 bounded by two circle leaves.

#include <Eigen/Core>

#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "foliate/operator.hpp"

namespace foliate {

/// Real function on the plane with a certified sup-norm bound.
class PlaneFunction {
 public:
  using Fn = std::function<double(double, double)>;

  /// coefficient * cos or sin of 2 pi (m x + n y)
  struct TorusTerm {
    double coefficient;
    int m;
    int n;
    bool sine;
  };

  PlaneFunction(Fn fn, double bound, std::optional<double> period_x = std::nullopt,
                std::optional<double> period_y = std::nullopt, std::string label = "custom");

  static PlaneFunction constant(double c);
  /// Sum of Fourier modes on the unit torus; 1-periodic in both arguments.
  static PlaneFunction torus(double mean, std::vector<TorusTerm> terms);

  double operator()(double x, double y) const { return fn_(x, y); }
  double bound() const { return bound_; }
  std::optional<double> period_x() const { return period_x_; }
  std::optional<double> period_y() const { return period_y_; }
  const std::string& label() const { return label_; }

 private:
  Fn fn_;
  double bound_;
  std::optional<double> period_x_;
  std::optional<double> period_y_;
  std::string label_;
};

/// Linear foliation of the unit torus by lines of a fixed slope.
struct TorusFlow {
  double slope = std::numbers::sqrt2;

  /// Point of leaf C at parameter t, reduced to [0, 1)^2.
  Eigen::Vector2d point(double t, double offset) const;
  /// Offset of the leaf through (x, y) when it is reached at parameter x.
  double offset_through(double x, double y) const { return y - slope * x; }
};

/// Solves u + u' = v along the leaf t -> (t, slope t + offset). v must be
/// 1-periodic in x (KindError otherwise). The returned profile carries the
/// measured defect max |U(x + 1, y) - U(x, y)| over the grid.
SolutionProfile torus_solve(const PlaneFunction& v, double offset,
                            const Eigen::Ref<const Eigen::VectorXd>& grid,
                            const OperatorConfig& cfg, const TorusFlow& torus = {});

/// r(theta, s) = 3/2 + atan(theta + s) / pi, which stays inside (1, 2).
double spiral_radius(double theta, double s);
/// d r / d theta at fixed s.
double spiral_radius_slope(double theta, double s);

struct ChartPoint {
  double theta;
  double s;
};

Eigen::Vector2d chart_to_cartesian(double theta, double s);
/// Inverse chart; s lands in [-pi, pi] through the winding of theta. Throws
/// OutOfAnnulusError unless 1 < |(x, y)| < 2.
ChartPoint cartesian_to_chart(double x, double y);
/// Leaf tangent (F, G) = d/dtheta of chart_to_cartesian at fixed s.
Eigen::Vector2d induced_field_at(double x, double y);

/// Function on the closed annulus built from terms c r^d {1, cos m theta,
/// sin m theta}. Such functions depend on (r, theta mod 2 pi) only, so they
/// extend continuously to both boundary circles.
class AnnulusFunction {
 public:
  enum class Mode { one, cosine, sine };
  struct Term {
    double coefficient;
    int degree;
    Mode mode;
    int harmonic;
  };

  AnnulusFunction() = default;
  explicit AnnulusFunction(std::vector<Term> terms);
  static AnnulusFunction constant(double c);

  double operator()(double r, double theta) const;
  /// sum |c| 2^d
  double bound() const;
  const std::vector<Term>& terms() const { return terms_; }

 private:
  std::vector<Term> terms_;
};

/// Solves u + du/dtheta = v(r(theta, s), theta) along the spiral leaf s.
SolutionProfile spiral_solve(const AnnulusFunction& v, double s,
                             const Eigen::Ref<const Eigen::VectorXd>& theta_grid,
                             const OperatorConfig& cfg);

/// Solves u + du/dtheta = v(radius, theta) on a boundary circle (radius 1 or
/// 2), using the periodic reduction; theta may be any real.
SolutionProfile circle_solve(const AnnulusFunction& v, double radius,
                             const Eigen::Ref<const Eigen::VectorXd>& theta_grid,
                             const OperatorConfig& cfg);

/// |u_spiral(theta) - u_circle(theta)|, against the inner circle for
/// theta <= 0 and the outer circle for theta > 0.
double asymptotic_gap(const AnnulusFunction& v, double s, double theta,
                      const OperatorConfig& cfg);

}  // namespace foliate
