#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>

#include "foliate/errors.hpp"

namespace foliate {

/// Finite-difference weights (Fornberg's recursion) for derivatives of order
/// 0..max_order at z, from arbitrary distinct nodes. Column k holds the
/// weights of the k-th derivative.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> fd_weights(
    Scalar z, const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& nodes,
    int max_order) {
  const Eigen::Index n = nodes.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> c =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, max_order + 1);
  Scalar c1 = 1;
  Scalar c4 = nodes[0] - z;
  c(0, 0) = 1;
  for (Eigen::Index i = 1; i < n; ++i) {
    const int mn = static_cast<int>(std::min<Eigen::Index>(i, max_order));
    Scalar c2 = 1;
    const Scalar c5 = c4;
    c4 = nodes[i] - z;
    for (Eigen::Index j = 0; j < i; ++j) {
      const Scalar c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c(i, k) = c1 * (Scalar(k) * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
        }
        c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k) c(j, k) = (c4 * c(j, k) - Scalar(k) * c(j, k - 1)) / c3;
      c(j, 0) = c4 * c(j, 0) / c3;
    }
    c1 = c2;
  }
  return c;
}

/// Derivative of sampled values using the grid's own spacing, on a centred
/// stencil of 2*half_width+1 points. Entries without a full stencil are NaN.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> central_derivative(
    const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& grid,
    const Eigen::Ref<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& values, int half_width,
    int order = 1) {
  const Eigen::Index n = grid.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out =
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Constant(n, std::numeric_limits<Scalar>::quiet_NaN());
  const Eigen::Index w = half_width;
  const Eigen::Index len = 2 * w + 1;
  for (Eigen::Index i = w; i + w < n; ++i) {
    const auto c = fd_weights<Scalar>(grid[i], grid.segment(i - w, len), order);
    out[i] = c.col(order).dot(values.segment(i - w, len));
  }
  return out;
}

/// Largest centred stencil half-width (at most `preferred`) that the grid
/// supports at one or more points.
inline int supported_half_width(Eigen::Index points, int preferred = 2) {
  const int fit = static_cast<int>((points - 1) / 2);
  return std::min(preferred, fit);
}

/// Centred finite difference of a callable: derivative of the given order at
/// x with uniform step h on offsets -half_width..half_width.
template <typename Scalar, typename F>
Scalar central_difference(F&& f, Scalar x, Scalar h, int order, int half_width) {
  if (2 * half_width < order) throw DomainError("stencil too narrow for derivative order");
  const Eigen::Index len = 2 * half_width + 1;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> offsets(len);
  for (Eigen::Index k = 0; k < len; ++k) offsets[k] = Scalar(k - half_width);
  const auto c = fd_weights<Scalar>(Scalar(0), offsets, order);
  Scalar acc = 0;
  for (Eigen::Index k = 0; k < len; ++k) {
    if (c(k, order) != Scalar(0)) acc += c(k, order) * f(x + offsets[k] * h);
  }
  return acc / std::pow(h, order);
}

}  // namespace foliate
