#pragma once

// Gauss-Legendre panel quadrature and the exponentially damped kernel
//
//     (K f)(x) = \int_0^{span} e^{-s} f(x - s) ds
//
// that every leaf solver in the library reduces to.

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <algorithm>
#include <utility>

#include "foliate/errors.hpp"

namespace foliate {

/// 5-point Gauss-Legendre rule on [-1, 1].
template <typename Scalar>
struct GaussLegendre5 {
  static constexpr std::array<Scalar, 5> nodes{
      Scalar(-0.906179845938663992797626878299392965L),
      Scalar(-0.538469310105683091036314420700208805L),
      Scalar(0),
      Scalar(0.538469310105683091036314420700208805L),
      Scalar(0.906179845938663992797626878299392965L)};
  static constexpr std::array<Scalar, 5> weights{
      Scalar(0.236926885056189087514264040719917363L),
      Scalar(0.478628670499366468041291514835638192L),
      Scalar(0.568888888888888888888888888888888889L),
      Scalar(0.478628670499366468041291514835638192L),
      Scalar(0.236926885056189087514264040719917363L)};
};

/// Neumaier's compensated summation.
template <typename Scalar>
class CompensatedSum {
 public:
  void add(Scalar x) {
    const Scalar t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  Scalar value() const { return sum_ + carry_; }

 private:
  Scalar sum_{0};
  Scalar carry_{0};
};

/// Number of equal panels of width at most `step` covering a span.
inline std::size_t panel_count(double span, double step) {
  const double n = std::ceil(std::abs(span) / step - 1e-12);
  return n < 1.0 ? std::size_t{1} : static_cast<std::size_t>(n);
}

/// Composite 5-point Gauss-Legendre over [a, b] with panels of width <= step.
template <typename Scalar, typename F>
Scalar integrate_panels(F&& f, Scalar a, Scalar b, Scalar step) {
  using Rule = GaussLegendre5<Scalar>;
  const std::size_t n = panel_count(static_cast<double>(b - a), static_cast<double>(step));
  const Scalar width = (b - a) / Scalar(n);
  const Scalar half = width / Scalar(2);
  CompensatedSum<Scalar> acc;
  for (std::size_t p = 0; p < n; ++p) {
    const Scalar mid = a + (Scalar(p) + Scalar(0.5)) * width;
    for (std::size_t i = 0; i < 5; ++i) {
      acc.add(Rule::weights[i] * half * f(mid + half * Rule::nodes[i]));
    }
  }
  return acc.value();
}

/// Mean value of f over [a, b], (1/(b-a)) \int_a^b f. Well defined for a == b,
/// where it returns f(a).
template <typename Scalar, typename F>
Scalar mean_over(F&& f, Scalar a, Scalar b, Scalar step) {
  using Rule = GaussLegendre5<Scalar>;
  const std::size_t n = panel_count(static_cast<double>(b - a), static_cast<double>(step));
  const Scalar width = (b - a) / Scalar(n);
  const Scalar half = width / Scalar(2);
  CompensatedSum<Scalar> acc;
  for (std::size_t p = 0; p < n; ++p) {
    const Scalar mid = a + (Scalar(p) + Scalar(0.5)) * width;
    for (std::size_t i = 0; i < 5; ++i) {
      acc.add(Rule::weights[i] * Scalar(0.5) * f(mid + half * Rule::nodes[i]));
    }
  }
  return acc.value() / Scalar(n);
}

namespace detail {

template <typename Scalar, typename F>
Scalar gl5(F& f, Scalar a, Scalar b) {
  using Rule = GaussLegendre5<Scalar>;
  const Scalar mid = (a + b) / Scalar(2);
  const Scalar half = (b - a) / Scalar(2);
  Scalar s{0};
  for (std::size_t i = 0; i < 5; ++i) s += Rule::weights[i] * f(mid + half * Rule::nodes[i]);
  return s * half;
}

template <typename Scalar, typename F>
Scalar adaptive_step(F& f, Scalar a, Scalar b, Scalar whole, Scalar tol, int depth) {
  const Scalar mid = (a + b) / Scalar(2);
  const Scalar left = gl5(f, a, mid);
  const Scalar right = gl5(f, mid, b);
  // The floor keeps the test attainable once the pieces reach rounding level.
  const Scalar floor = Scalar(8) * std::numeric_limits<Scalar>::epsilon() *
                       (std::abs(left) + std::abs(right));
  if (depth <= 0 || std::abs(left + right - whole) <= std::max(tol, floor)) return left + right;
  return adaptive_step(f, a, mid, left, tol / Scalar(2), depth - 1) +
         adaptive_step(f, mid, b, right, tol / Scalar(2), depth - 1);
}

}  // namespace detail

/// Adaptive bisection with 5-point Gauss-Legendre panels. Meant for integrands
/// with steep endpoint behaviour, e.g. 1/sin near a cutoff.
template <typename Scalar, typename F>
Scalar integrate_adaptive(F&& f, Scalar a, Scalar b, Scalar tol = Scalar(1e-13),
                          int max_depth = 48) {
  // Seed with a coarse uniform split so that narrow features are not missed.
  constexpr int seed = 16;
  const Scalar width = (b - a) / Scalar(seed);
  CompensatedSum<Scalar> acc;
  for (int k = 0; k < seed; ++k) {
    const Scalar lo = a + Scalar(k) * width;
    const Scalar hi = (k + 1 == seed) ? b : lo + width;
    acc.add(detail::adaptive_step(f, lo, hi, detail::gl5(f, lo, hi), tol / Scalar(seed),
                                  max_depth));
  }
  return acc.value();
}

/// Precomputed quadrature for the damped kernel
///
///     (K f)(x) = scale * \int_0^{span} e^{-s} f(x - s) ds
///
/// on composite Gauss-Legendre panels of width <= step. The node table does not
/// depend on x, so one kernel serves a whole grid.
template <typename Scalar>
class DampedKernel {
 public:
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  DampedKernel(Scalar span, Scalar step, Scalar scale = Scalar(1)) : span_(span) {
    if (!(span > Scalar(0)) || !(step > Scalar(0))) {
      throw ConfigError("damped kernel needs positive span and step");
    }
    using Rule = GaussLegendre5<Scalar>;
    // Panels of width `step` measured from s = 0 and a shorter last panel, so
    // a longer span reuses every node of a shorter one.
    const std::size_t n = panel_count(static_cast<double>(span), static_cast<double>(step));
    offsets_.resize(static_cast<Eigen::Index>(5 * n));
    weights_.resize(static_cast<Eigen::Index>(5 * n));
    Eigen::Index j = 0;
    for (std::size_t p = 0; p < n; ++p) {
      const Scalar lo = Scalar(p) * step;
      const Scalar hi = p + 1 == n ? span : lo + step;
      const Scalar mid = (lo + hi) / Scalar(2);
      const Scalar half = (hi - lo) / Scalar(2);
      for (std::size_t i = 0; i < 5; ++i, ++j) {
        const Scalar s = mid + half * Rule::nodes[i];
        offsets_[j] = s;
        weights_[j] = scale * Rule::weights[i] * half * std::exp(-s);
      }
    }
  }

  /// Kernel for the periodic reduction
  ///     (1 / (1 - e^{-P})) \int_0^P e^{-s} f(x - s) ds.
  static DampedKernel periodic(Scalar period, Scalar step) {
    return DampedKernel(period, step, Scalar(1) / -std::expm1(-period));
  }

  /// Applies the kernel at x. Throws EvaluationError naming the first node
  /// where f is not finite.
  template <typename F>
  Scalar apply(F&& f, Scalar x) const {
    CompensatedSum<Scalar> acc;
    for (Eigen::Index j = 0; j < offsets_.size(); ++j) acc.add(weights_[j] * f(x - offsets_[j]));
    const Scalar result = acc.value();
    if (!std::isfinite(result)) {
      for (Eigen::Index j = 0; j < offsets_.size(); ++j) {
        const Scalar t = x - offsets_[j];
        if (!std::isfinite(f(t))) {
          throw EvaluationError("input function is not finite", static_cast<double>(t));
        }
      }
      throw EvaluationError("kernel sum overflowed", static_cast<double>(x));
    }
    return result;
  }

  Scalar span() const { return span_; }
  const Array& offsets() const { return offsets_; }
  const Array& weights() const { return weights_; }

 private:
  Scalar span_;
  Array offsets_;
  Array weights_;
};

}  // namespace foliate
