#include "foliate/flow.hpp"

#include <cmath>
#include <limits>
#include <mutex>

#include "foliate/errors.hpp"
#include "foliate/finite_difference.hpp"
#include "foliate/quadrature.hpp"

namespace foliate {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kFlowStencilHalf = 3;

// Visits every point of a uniform lattice with `per_axis` points on each axis.
template <typename F>
void for_each_lattice_point(const WorkingRegion& region, int per_axis, F&& visit) {
  const Eigen::Index n = region.dimension();
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd x(n);
  while (true) {
    for (Eigen::Index d = 0; d < n; ++d) {
      const double u = static_cast<double>(idx[static_cast<std::size_t>(d)]) / (per_axis - 1);
      x[d] = region.lower[d] + u * (region.upper[d] - region.lower[d]);
    }
    visit(x);
    Eigen::Index d = 0;
    while (d < n && ++idx[static_cast<std::size_t>(d)] == per_axis) {
      idx[static_cast<std::size_t>(d)] = 0;
      ++d;
    }
    if (d == n) break;
  }
}

DampedKernel<double> field_kernel(const ScalarField& v, const FlowMap& flow,
                                  const OperatorConfig& cfg) {
  return DampedKernel<double>(cfg.truncation_for(v.bound_over(flow.field().region())),
                              cfg.quad_step);
}

}  // namespace

FlowField::FlowField(std::vector<ScalarField> components, WorkingRegion region, double floor,
                     double step, bool unit_speed, int lattice)
    : components_(std::move(components)),
      region_(std::move(region)),
      floor_(floor),
      step_(step),
      unit_speed_(unit_speed) {
  region_.validate();
  if (static_cast<Eigen::Index>(components_.size()) != region_.dimension()) {
    throw DomainError("vector field needs one component per region axis");
  }
  for (const auto& c : components_) {
    if (c.dimension() != region_.dimension()) throw DomainError("component dimension mismatch");
  }
  if (!(step_ > 0.0)) throw ConfigError("integrator step must be > 0");
  if (!(floor_ > 0.0)) throw DomainError("non-vanishing floor must be > 0");
  if (lattice < 2) throw ConfigError("lattice needs at least two points per axis");

  sampled_min_ = std::numeric_limits<double>::infinity();
  for_each_lattice_point(region_, lattice, [&](const Eigen::VectorXd& x) {
    if (!region_.contains(x)) return;
    Eigen::VectorXd raw(region_.dimension());
    for (Eigen::Index i = 0; i < raw.size(); ++i) raw[i] = components_[static_cast<std::size_t>(i)](x);
    sampled_min_ = std::min(sampled_min_, raw.norm());
  });
  if (sampled_min_ < floor_) {
    throw DomainError("vector field drops to " + std::to_string(sampled_min_) +
                      " in the working region, below the floor " + std::to_string(floor_));
  }
}

FlowField FlowField::translation(WorkingRegion region, Eigen::Index axis, double step) {
  const Eigen::Index n = region.dimension();
  std::vector<ScalarField> comps;
  for (Eigen::Index i = 0; i < n; ++i) comps.push_back(ScalarField::constant(n, i == axis ? 1.0 : 0.0));
  return FlowField(std::move(comps), std::move(region), 1.0, step);
}

FlowField FlowField::rotation(WorkingRegion region, double hole, double step) {
  if (region.dimension() != 2) throw DomainError("rotation field lives in the plane");
  using P = ScalarField::Profile;
  std::vector<ScalarField> comps{ScalarField::axis(2, 1, -1.0, P::linear),
                                 ScalarField::axis(2, 0, 1.0, P::linear)};
  WorkingRegion cut = region.with_hole(Eigen::VectorXd::Zero(2), hole);
  return FlowField(std::move(comps), std::move(cut), hole, step);
}

Eigen::VectorXd FlowField::operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd out(dimension());
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = components_[static_cast<std::size_t>(i)](x);
  if (unit_speed_) out /= out.norm();
  return out;
}

FlowMap::FlowMap(FlowField field, bool cache) : field_(std::move(field)), use_cache_(cache) {}

Eigen::VectorXd FlowMap::rk4(const Eigen::VectorXd& x, double h, double sign) const {
  const Eigen::VectorXd k1 = sign * field_(x);
  const Eigen::VectorXd k2 = sign * field_(x + 0.5 * h * k1);
  const Eigen::VectorXd k3 = sign * field_(x + 0.5 * h * k2);
  const Eigen::VectorXd k4 = sign * field_(x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Eigen::VectorXd FlowMap::flow(const Eigen::Ref<const Eigen::VectorXd>& x, double t) const {
  if (x.size() != field_.dimension()) throw DomainError("point dimension mismatch");
  if (!field_.region().contains(x)) throw EscapeError("start point outside the working region", 0.0);
  if (t == 0.0) return x;

  std::vector<double> key(x.data(), x.data() + x.size());
  key.push_back(t);
  if (use_cache_) {
    std::shared_lock lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }

  const double sign = t > 0.0 ? 1.0 : -1.0;
  const double span = std::abs(t);
  const auto steps = static_cast<long>(std::ceil(span / field_.step() - 1e-12));
  const double h = span / static_cast<double>(std::max(steps, 1L));
  Eigen::VectorXd state = x;
  for (long k = 1; k <= steps; ++k) {
    state = rk4(state, h, sign);
    if (!state.allFinite() || !field_.region().contains(state)) {
      throw EscapeError("trajectory left the working region", sign * h * static_cast<double>(k));
    }
  }

  if (use_cache_) {
    std::unique_lock lock(mutex_);
    cache_.emplace(std::move(key), state);
  }
  return state;
}

Eigen::MatrixXd FlowMap::trajectory_back(const Eigen::Ref<const Eigen::VectorXd>& x,
                                         const Eigen::Ref<const Eigen::ArrayXd>& depths) const {
  if (x.size() != field_.dimension()) throw DomainError("point dimension mismatch");
  if (!field_.region().contains(x)) throw EscapeError("start point outside the working region", 0.0);
  const double dt = field_.step();
  Eigen::MatrixXd out(x.size(), depths.size());
  Eigen::VectorXd state = x;
  long k = 0;
  double last = 0.0;
  for (Eigen::Index j = 0; j < depths.size(); ++j) {
    const double target = depths[j];
    if (!(target >= last)) throw DomainError("trajectory depths must be ascending and >= 0");
    last = target;
    while (static_cast<double>(k + 1) * dt <= target) {
      state = rk4(state, dt, -1.0);
      ++k;
      if (!state.allFinite() || !field_.region().contains(state)) {
        throw EscapeError("backward trajectory left the working region",
                          -dt * static_cast<double>(k));
      }
    }
    const double rest = target - static_cast<double>(k) * dt;
    if (rest > 0.0) {
      out.col(j) = rk4(state, rest, -1.0);
      if (!out.col(j).allFinite() || !field_.region().contains(out.col(j))) {
        throw EscapeError("backward trajectory left the working region", -target);
      }
    } else {
      out.col(j) = state;
    }
  }
  return out;
}

std::size_t FlowMap::cache_size() const {
  std::shared_lock lock(mutex_);
  return cache_.size();
}

double solve_field(const FlowMap& flow, const ScalarField& v,
                   const Eigen::Ref<const Eigen::VectorXd>& x, const OperatorConfig& cfg) {
  const auto kernel = field_kernel(v, flow, cfg);
  const Eigen::MatrixXd path = flow.trajectory_back(x, kernel.offsets());
  CompensatedSum<double> acc;
  for (Eigen::Index j = 0; j < path.cols(); ++j) {
    const double value = v(path.col(j));
    if (!std::isfinite(value)) {
      throw EvaluationError("field value is not finite", -kernel.offsets()[j]);
    }
    acc.add(kernel.weights()[j] * value);
  }
  return acc.value();
}

double solve_field_derivative(const FlowMap& flow, const ScalarField& v,
                              const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Index axis,
                              const OperatorConfig& cfg, int order, double flow_step) {
  if (order < 1 || order > 3) throw DomainError("derivative order must be 1..3");
  if (axis < 0 || axis >= x.size()) throw DomainError("axis index out of range");
  if (!(flow_step > 0.0)) throw ConfigError("flow difference step must be > 0");
  const auto kernel = field_kernel(v, flow, cfg);

  constexpr int width = 2 * kFlowStencilHalf + 1;
  Eigen::VectorXd offsets(width);
  for (int k = 0; k < width; ++k) offsets[k] = k - kFlowStencilHalf;
  const Eigen::MatrixXd c = fd_weights<double>(0.0, offsets, order);

  std::vector<Eigen::MatrixXd> paths;
  paths.reserve(width);
  for (int k = 0; k < width; ++k) {
    Eigen::VectorXd start = x;
    start[axis] += offsets[k] * flow_step;
    paths.push_back(flow.trajectory_back(start, kernel.offsets()));
  }
  const Eigen::MatrixXd& centre = paths[kFlowStencilHalf];

  CompensatedSum<double> acc;
  std::vector<Eigen::VectorXd> p(static_cast<std::size_t>(order));
  for (Eigen::Index j = 0; j < centre.cols(); ++j) {
    for (int m = 1; m <= order; ++m) {
      Eigen::VectorXd d = Eigen::VectorXd::Zero(x.size());
      for (int k = 0; k < width; ++k) {
        if (c(k, m) != 0.0) d += c(k, m) * paths[static_cast<std::size_t>(k)].col(j);
      }
      p[static_cast<std::size_t>(m - 1)] = d / std::pow(flow_step, m);
    }
    acc.add(kernel.weights()[j] * v.chain_derivative(centre.col(j), p, order));
  }
  return acc.value();
}

double field_residual(const FlowMap& flow, const ScalarField& v,
                      const Eigen::Ref<const Eigen::VectorXd>& x, double h,
                      const OperatorConfig& cfg) {
  if (!(h > 0.0)) throw DomainError("residual step must be > 0");
  const double ahead = solve_field(flow, v, flow.flow(x, h), cfg);
  const double behind = solve_field(flow, v, flow.flow(x, -h), cfg);
  return std::abs((ahead - behind) / (2.0 * h) + solve_field(flow, v, x, cfg) - v(x));
}

SmoothnessReport smoothness_order_check(const FlowMap& flow, const ScalarField& v,
                                        const Eigen::Ref<const Eigen::VectorXd>& x,
                                        Eigen::Index axis, int max_order,
                                        const OperatorConfig& cfg, std::vector<double> steps) {
  if (max_order < 1 || max_order > 3) throw DomainError("smoothness check supports orders 1..3");
  if (steps.size() < 2) throw DomainError("order estimate needs at least two steps");
  const Eigen::VectorXd base = x;
  auto along = [&](double t) {
    Eigen::VectorXd p = base;
    p[axis] += t;
    return solve_field(flow, v, p, cfg);
  };
  const double scale = std::max({1.0, std::abs(solve_field(flow, v, base, cfg)),
                                 v.bound_over(flow.field().region())});

  SmoothnessReport report;
  for (int m = 1; m <= max_order; ++m) {
    OrderCheck check;
    check.order = m;
    check.steps = steps;
    check.analytic = solve_field_derivative(flow, v, base, axis, cfg, m);
    const int half = m <= 2 ? 1 : 2;
    bool exact = true;
    for (double h : steps) {
      const double fd = central_difference<double>(along, 0.0, h, m, half);
      const double gap = std::abs(fd - check.analytic);
      check.finite_difference.push_back(fd);
      check.discrepancy.push_back(gap);
      report.max_discrepancy = std::max(report.max_discrepancy, gap);
      // rounding in U amplified by the stencil
      const double noise = 16.0 * std::numeric_limits<double>::epsilon() * scale / std::pow(h, m);
      exact = exact && gap <= noise;
    }
    check.exact = exact;
    const std::size_t n = steps.size();
    const double coarse = check.discrepancy[n - 2];
    const double fine = check.discrepancy[n - 1];
    check.noise_floor = !exact && !(fine < coarse);
    check.estimated_order = (exact || check.noise_floor)
                                ? kNaN
                                : std::log(coarse / fine) / std::log(steps[n - 2] / steps[n - 1]);
    report.orders.push_back(std::move(check));
  }
  return report;
}

}  // namespace foliate
