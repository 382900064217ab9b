#include "foliate/field.hpp"

#include <cmath>

#include "foliate/errors.hpp"

namespace foliate {

WorkingRegion WorkingRegion::box(Eigen::VectorXd lower, Eigen::VectorXd upper) {
  WorkingRegion r{std::move(lower), std::move(upper), std::nullopt, 0.0};
  r.validate();
  return r;
}

WorkingRegion WorkingRegion::with_hole(Eigen::VectorXd center, double radius) const {
  WorkingRegion r = *this;
  r.hole_center = std::move(center);
  r.hole_radius = radius;
  r.validate();
  return r;
}

bool WorkingRegion::contains(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if ((x.array() < lower.array()).any() || (x.array() > upper.array()).any()) return false;
  if (hole_center && (x - *hole_center).norm() < hole_radius) return false;
  return true;
}

void WorkingRegion::validate() const {
  if (lower.size() == 0 || lower.size() != upper.size()) {
    throw ConfigError("working region bounds must be nonempty and of equal dimension");
  }
  if (!lower.allFinite() || !upper.allFinite() || !(lower.array() < upper.array()).all()) {
    throw ConfigError("working region needs finite bounds with lower < upper");
  }
  if (hole_center && (hole_center->size() != lower.size() || !(hole_radius > 0.0))) {
    throw ConfigError("excluded ball needs a matching centre and a positive radius");
  }
}

double profile_derivative(ScalarField::Profile profile, double z, int order) {
  using P = ScalarField::Profile;
  switch (profile) {
    case P::constant:
      return order == 0 ? 1.0 : 0.0;
    case P::linear:
      return order == 0 ? z : (order == 1 ? 1.0 : 0.0);
    case P::sine: {
      static constexpr double sign[] = {1.0, 1.0, -1.0, -1.0};
      return sign[order % 4] * (order % 2 == 0 ? std::sin(z) : std::cos(z));
    }
    case P::cosine: {
      static constexpr double sign[] = {1.0, -1.0, -1.0, 1.0};
      return sign[order % 4] * (order % 2 == 0 ? std::cos(z) : std::sin(z));
    }
    case P::tanh: {
      const double t = std::tanh(z);
      const double s = 1.0 - t * t;  // sech^2
      switch (order) {
        case 0:
          return t;
        case 1:
          return s;
        case 2:
          return -2.0 * t * s;
        case 3:
          return s * (6.0 * t * t - 2.0);
        default:
          break;
      }
      break;
    }
  }
  throw DomainError("profile derivatives are available up to order 3");
}

ScalarField::ScalarField(Eigen::Index dimension, std::vector<Ridge> ridges)
    : dimension_(dimension), ridges_(std::move(ridges)) {
  if (dimension_ < 1) throw DomainError("field dimension must be >= 1");
  for (auto& r : ridges_) {
    if (r.profile == Profile::constant) r.direction = Eigen::VectorXd::Zero(dimension_);
    if (r.direction.size() != dimension_) throw DomainError("ridge direction has wrong dimension");
    if (!std::isfinite(r.amplitude) || !std::isfinite(r.shift) || !r.direction.allFinite()) {
      throw DomainError("ridge parameters must be finite");
    }
  }
}

ScalarField ScalarField::constant(Eigen::Index dimension, double c) {
  return ScalarField(dimension, {Ridge{c, Profile::constant, Eigen::VectorXd::Zero(dimension), 0.0}});
}

ScalarField ScalarField::axis(Eigen::Index dimension, Eigen::Index axis, double amplitude,
                              Profile profile, double shift) {
  if (axis < 0 || axis >= dimension) throw DomainError("axis index out of range");
  Eigen::VectorXd k = Eigen::VectorXd::Unit(dimension, axis);
  return ScalarField(dimension, {Ridge{amplitude, profile, std::move(k), shift}});
}

double ScalarField::operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  double s = 0.0;
  for (const auto& r : ridges_) {
    s += r.amplitude * profile_derivative(r.profile, r.direction.dot(x) + r.shift, 0);
  }
  return s;
}

Eigen::VectorXd ScalarField::gradient(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dimension_);
  for (const auto& r : ridges_) {
    g += r.amplitude * profile_derivative(r.profile, r.direction.dot(x) + r.shift, 1) *
         r.direction;
  }
  return g;
}

double ScalarField::chain_derivative(const Eigen::Ref<const Eigen::VectorXd>& x,
                                     const std::vector<Eigen::VectorXd>& p, int order) const {
  if (order < 0 || order > 3) throw DomainError("chain derivative order must be 0..3");
  if (static_cast<int>(p.size()) < order) throw DomainError("missing curve derivatives");
  double s = 0.0;
  for (const auto& r : ridges_) {
    const double z = r.direction.dot(x) + r.shift;
    auto g = [&](int j) { return profile_derivative(r.profile, z, j); };
    double term = 0.0;
    if (order == 0) {
      term = g(0);
    } else {
      const double q1 = r.direction.dot(p[0]);
      if (order == 1) {
        term = g(1) * q1;
      } else {
        const double q2 = r.direction.dot(p[1]);
        if (order == 2) {
          term = g(2) * q1 * q1 + g(1) * q2;
        } else {
          const double q3 = r.direction.dot(p[2]);
          term = g(3) * q1 * q1 * q1 + 3.0 * g(2) * q1 * q2 + g(1) * q3;
        }
      }
    }
    s += r.amplitude * term;
  }
  return s;
}

double ScalarField::bound_over(const WorkingRegion& region) const {
  if (region.dimension() != dimension_) throw DomainError("region dimension mismatch");
  double m = 0.0;
  for (const auto& r : ridges_) {
    double sup = 1.0;
    if (r.profile == Profile::linear) {
      // |k . x + b| over a box peaks at the corner picked by sign(k).
      double hi = r.shift;
      double lo = r.shift;
      for (Eigen::Index i = 0; i < dimension_; ++i) {
        const double a = r.direction[i] * region.lower[i];
        const double b = r.direction[i] * region.upper[i];
        hi += std::max(a, b);
        lo += std::min(a, b);
      }
      sup = std::max(std::abs(hi), std::abs(lo));
    }
    m += std::abs(r.amplitude) * sup;
  }
  return m;
}

bool ScalarField::is_zero() const {
  for (const auto& r : ridges_)
    if (r.amplitude != 0.0) return false;
  return true;
}

}  // namespace foliate
