#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace foliate {

/// Axis-aligned box in R^n, optionally with an open ball removed (e.g. around
/// a zero of the vector field).
struct WorkingRegion {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::optional<Eigen::VectorXd> hole_center;
  double hole_radius = 0.0;

  static WorkingRegion box(Eigen::VectorXd lower, Eigen::VectorXd upper);
  WorkingRegion with_hole(Eigen::VectorXd center, double radius) const;

  Eigen::Index dimension() const { return lower.size(); }
  bool contains(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  void validate() const;
};

/// Sum of ridge terms a g(k . x + b) with g from a small analytic catalog.
/// Directional derivatives of every order up to three are exact.
class ScalarField {
 public:
  enum class Profile { constant, linear, sine, cosine, tanh };
  struct Ridge {
    double amplitude;
    Profile profile;
    Eigen::VectorXd direction;  // k; ignored for constant
    double shift;               // b
  };

  ScalarField() = default;
  ScalarField(Eigen::Index dimension, std::vector<Ridge> ridges);
  static ScalarField constant(Eigen::Index dimension, double c);
  /// a g(x_axis + b)
  static ScalarField axis(Eigen::Index dimension, Eigen::Index axis, double amplitude,
                          Profile profile, double shift = 0.0);

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::VectorXd gradient(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// Sum over ridges of a g^{(j)}(k . x + b) q_1 ... where q_m = k . p_m; the
  /// chain-rule combination of d^order/dh^order V(x(h)) given the first
  /// `order` derivatives p_1..p_order of the curve x(h).
  double chain_derivative(const Eigen::Ref<const Eigen::VectorXd>& x,
                          const std::vector<Eigen::VectorXd>& curve_derivatives,
                          int order) const;

  /// Certified bound of |value| over a box (corners for linear profiles).
  double bound_over(const WorkingRegion& region) const;

  Eigen::Index dimension() const { return dimension_; }
  const std::vector<Ridge>& ridges() const { return ridges_; }
  bool is_zero() const;

 private:
  Eigen::Index dimension_ = 0;
  std::vector<Ridge> ridges_;
};

/// g^{(order)}(z) for a ridge profile, order 0..3.
double profile_derivative(ScalarField::Profile profile, double z, int order);

}  // namespace foliate
