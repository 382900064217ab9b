#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace foliate {

/// Real function of a single leaf parameter, drawn from a fixed catalog so
/// that a certified sup-norm bound is always available.
///
/// Periodic kinds wrap their argument. Polynomial and sampled kinds are
/// clamped to their stated interval; `in_domain` reports whether a point was
/// evaluated without clamping.
class LeafFunction {
 public:
  struct Constant {
    double value;
  };
  /// a[0] + sum_k a[k] cos(2 pi k t / period) + b[k] sin(2 pi k t / period)
  struct Trigonometric {
    double period;
    std::vector<double> a;
    std::vector<double> b;  // b[0] unused
  };
  /// sum_k c[k] t^k on [lo, hi]
  struct Polynomial {
    std::vector<double> coefficients;
    double lo;
    double hi;
  };
  /// Interpolated samples; order 1 is piecewise linear, order 3 is the
  /// monotone (Fritsch-Carlson) cubic, which never overshoots the data.
  struct Samples {
    Eigen::VectorXd grid;
    Eigen::VectorXd values;
    int order;
    Eigen::VectorXd slopes;  // cubic only
  };

  using Kind = std::variant<Constant, Trigonometric, Polynomial, Samples>;

  static LeafFunction constant(double c);
  static LeafFunction trigonometric(double period, std::vector<double> a, std::vector<double> b);
  /// sin(t) and cos(t), period 2 pi.
  static LeafFunction sine();
  static LeafFunction cosine();
  static LeafFunction polynomial(std::vector<double> coefficients, double lo, double hi);
  static LeafFunction samples(Eigen::VectorXd grid, Eigen::VectorXd values, int order = 1);

  double operator()(double t) const { return value(t); }
  double value(double t) const;

  /// Certified bound M >= sup |value| over the whole real line.
  double bound() const { return bound_; }
  std::optional<double> period() const;
  bool is_periodic() const { return period().has_value(); }
  /// True for constants and for trigonometric sums of period P.
  bool has_period(double p) const;
  bool in_domain(double t) const;
  /// Interval outside of which the function is clamped, if any.
  std::optional<std::pair<double, double>> domain() const;

  const Kind& kind() const { return kind_; }
  std::string describe() const;

  /// Replaces the computed bound by a caller-supplied one. The new bound is
  /// checked against dense sampling and rejected if it is too small.
  LeafFunction with_bound(double bound) const;

 private:
  explicit LeafFunction(Kind kind);
  void check_bound() const;

  Kind kind_;
  double bound_ = 0.0;
};

/// Strictly increasing grid lo..hi with `count` points. Uses
/// lo + ((hi - lo) * i) / (count - 1), so integer-valued points of a
/// symmetric grid land exactly.
Eigen::VectorXd make_grid(double lo, double hi, Eigen::Index count);

/// Throws ConfigError unless the grid is nonempty, finite and strictly
/// increasing.
void validate_grid(const Eigen::Ref<const Eigen::VectorXd>& grid);

}  // namespace foliate
