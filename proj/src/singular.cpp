#include "foliate/singular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "foliate/errors.hpp"
#include "foliate/finite_difference.hpp"
#include "foliate/quadrature.hpp"

namespace foliate {

namespace {

constexpr double kPi = std::numbers::pi;

// u1(x) = mean_{[0,x]} e^{t-x} v for x > 0, u3(x) = mean_{[x,0]} e^{x-t} v for
// x < 0; both tend to v(0).
double inner_branch(const LeafFunction& v, double x, double step) {
  if (x == 0.0) return v(0.0);
  if (x > 0.0) return mean_over([&](double t) { return std::exp(t - x) * v(t); }, 0.0, x, step);
  return mean_over([&](double t) { return std::exp(x - t) * v(t); }, x, 0.0, step);
}

// \int_1^x t e^{t-x} v dt for x >= 1
double outer_plus_integral(const LeafFunction& v, double a, double b, double step) {
  return integrate_panels([&](double t) { return t * std::exp(t - b) * v(t); }, a, b, step);
}

// \int_a^b t e^{a-t} v dt for a <= b <= -1
double outer_minus_integral(const LeafFunction& v, double a, double b, double step) {
  return integrate_panels([&](double t) { return t * std::exp(a - t) * v(t); }, a, b, step);
}

Eigen::Index index_of(const Eigen::VectorXd& grid, double x) {
  const auto* it = std::find(grid.data(), grid.data() + grid.size(), x);
  if (it == grid.data() + grid.size()) {
    throw ConfigError("singular grid must contain the junction x = " + std::to_string(x));
  }
  return it - grid.data();
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

double phi(double x) { return x >= 1.0 ? 1.0 : (x <= -1.0 ? -1.0 : x); }

double PiecewiseSolution::max_gap() const {
  return std::max({gap_zero, gap_plus_one, gap_minus_one});
}

double singular_line_value(const LeafFunction& v, double x, const SingularConfig& cfg) {
  const double h = cfg.quad_step;
  if (!(h > 0.0)) throw ConfigError("quadrature step must be > 0");
  if (x >= -1.0 && x <= 1.0) return inner_branch(v, x, h);
  if (x > 1.0) {
    const double u1 = inner_branch(v, 1.0, h);
    return (outer_plus_integral(v, 1.0, x, h) + std::exp(1.0 - x) * u1) / x;
  }
  const double u3 = inner_branch(v, -1.0, h);
  return (outer_minus_integral(v, x, -1.0, h) - std::exp(1.0 + x) * u3) / x;
}

PiecewiseSolution singular_line_solve(const LeafFunction& v,
                                      const Eigen::Ref<const Eigen::VectorXd>& grid_in,
                                      const SingularConfig& cfg) {
  const double h = cfg.quad_step;
  if (!(h > 0.0)) throw ConfigError("quadrature step must be > 0");
  validate_grid(grid_in);
  const Eigen::VectorXd grid = grid_in;
  const Eigen::Index i0 = index_of(grid, 0.0);
  const Eigen::Index ip = index_of(grid, 1.0);
  const Eigen::Index im = index_of(grid, -1.0);
  const Eigen::Index n = grid.size();

  PiecewiseSolution sol;
  sol.grid = grid;
  sol.values.resize(n);

  sol.u1 = {"u1", grid.segment(i0, ip - i0 + 1), Eigen::VectorXd(ip - i0 + 1)};
  for (Eigen::Index k = 0; k < sol.u1.grid.size(); ++k) {
    sol.u1.values[k] = inner_branch(v, sol.u1.grid[k], h);
  }
  sol.u3 = {"u3", grid.segment(im, i0 - im + 1), Eigen::VectorXd(i0 - im + 1)};
  for (Eigen::Index k = 0; k < sol.u3.grid.size(); ++k) {
    sol.u3.values[k] = inner_branch(v, sol.u3.grid[k], h);
  }

  // u2 = (1/x) [I(x) + e^{1-x} u1(1)], I(x) = \int_1^x t e^{t-x} v dt, carried
  // forward with the contracting factor e^{-(x_{k+1} - x_k)}.
  const double u1_at_1 = sol.u1.values[sol.u1.values.size() - 1];
  sol.u2 = {"u2", grid.segment(ip, n - ip), Eigen::VectorXd(n - ip)};
  double carry = 0.0;
  for (Eigen::Index k = 0; k < sol.u2.grid.size(); ++k) {
    const double x = sol.u2.grid[k];
    if (k > 0) {
      const double prev = sol.u2.grid[k - 1];
      carry = std::exp(prev - x) * carry + outer_plus_integral(v, prev, x, h);
    }
    sol.u2.values[k] = (carry + std::exp(1.0 - x) * u1_at_1) / x;
  }

  // u4 = (1/x) [J(x) - e^{1+x} u3(-1)], J(x) = \int_x^{-1} t e^{x-t} v dt, carried
  // backward from -1.
  const double u3_at_m1 = sol.u3.values[0];
  sol.u4 = {"u4", grid.segment(0, im + 1), Eigen::VectorXd(im + 1)};
  carry = 0.0;
  for (Eigen::Index k = im; k >= 0; --k) {
    const double x = sol.u4.grid[k];
    if (k < im) {
      const double next = sol.u4.grid[k + 1];
      carry = std::exp(x - next) * carry + outer_minus_integral(v, x, next, h);
    }
    sol.u4.values[k] = (carry - std::exp(1.0 + x) * u3_at_m1) / x;
  }

  sol.values.segment(0, im + 1) = sol.u4.values;
  sol.values.segment(im, i0 - im + 1) = sol.u3.values;
  sol.values.segment(i0, ip - i0 + 1) = sol.u1.values;
  sol.values.segment(ip, n - ip) = sol.u2.values;
  sol.values[im] = sol.u4.values[im];

  sol.gap_zero = std::abs(sol.u1.values[0] - sol.u3.values[sol.u3.values.size() - 1]);
  sol.gap_plus_one = std::abs(u1_at_1 - sol.u2.values[0]);
  sol.gap_minus_one = std::abs(u3_at_m1 - sol.u4.values[im]);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!std::isfinite(sol.values[k])) {
      throw EvaluationError("singular branch value is not finite", grid[k]);
    }
  }
  return sol;
}

double singular_line_residual(const PiecewiseSolution& sol, const LeafFunction& v) {
  double sup = 0.0;
  for (const BranchProfile* b : {&sol.u1, &sol.u2, &sol.u3, &sol.u4}) {
    const Eigen::Index n = b->grid.size();
    if (n < 3) throw DomainError("branch " + b->name + " needs at least three points");
    const Eigen::VectorXd xu = b->grid.cwiseProduct(b->values);
    const int w = supported_half_width(n);
    const Eigen::VectorXd dxu = central_derivative<double>(b->grid, xu, w);
    for (Eigen::Index k = w; k + w < n; ++k) {
      const double x = b->grid[k];
      const double lhs = phi(x) * (dxu[k] + std::abs(x) * b->values[k]);
      sup = std::max(sup, std::abs(lhs - x * v(x)));
    }
  }
  return sup;
}

std::vector<NaiveAttempt> naive_singular_demos() {
  std::vector<NaiveAttempt> out;

  NaiveAttempt log_form{"u = ln x (unweighted, near 0)", {}, 0.0};
  for (int k = 1; k <= 6; ++k) {
    const double x = std::pow(10.0, -k);
    log_form.samples.push_back({x, std::log(x)});
  }
  NaiveAttempt half_form{"u = x / 2 (x-weighted, large x)", {}, 0.0};
  for (double x : {1.0, 10.0, 50.0, 100.0}) half_form.samples.push_back({x, x / 2.0});
  NaiveAttempt exp_form{"u = 1 - 1/x + 1/(x e^x) (e^x-weighted, negative x)", {}, 0.0};
  for (double x : {-1.0, -5.0, -10.0, -20.0, -30.0}) {
    exp_form.samples.push_back({x, 1.0 - 1.0 / x + 1.0 / (x * std::exp(x))});
  }

  for (NaiveAttempt* a : {&log_form, &half_form, &exp_form}) {
    for (const auto& s : a->samples) a->peak = std::max(a->peak, std::abs(s.u));
    out.push_back(std::move(*a));
  }
  return out;
}

ObstructionReport circle_obstruction(const LeafFunction& v, const ObstructionConfig& cfg) {
  if (!v.has_period(2.0 * kPi)) {
    throw KindError("circle obstruction needs a 2 pi periodic input, got " + v.describe());
  }
  if (cfg.cutoffs.size() < 3) throw ConfigError("obstruction needs at least three cutoffs");
  for (std::size_t k = 0; k < cfg.cutoffs.size(); ++k) {
    const double eta = cfg.cutoffs[k];
    if (!(eta > 0.0 && eta < kPi / 2.0) || (k > 0 && !(eta < cfg.cutoffs[k - 1]))) {
      throw ConfigError("cutoffs must decrease inside (0, pi/2)");
    }
  }
  if (cfg.arc_points < 2) throw ConfigError("arc solutions need at least two points");

  ObstructionReport rep;
  rep.cutoffs = cfg.cutoffs;
  rep.kappa = cfg.kappa;
  rep.multiplier = std::exp(2.0 * kPi * cfg.kappa);
  auto weight = [&](double t) { return std::exp(cfg.kappa * t); };
  auto integrand = [&](double t) { return weight(t) * v(t) / std::sin(t); };

  for (double eta : cfg.cutoffs) {
    rep.upper_arc.push_back(integrate_adaptive(integrand, eta, kPi - eta, cfg.tolerance));
    rep.lower_arc.push_back(
        integrate_adaptive(integrand, kPi + eta, 2.0 * kPi - eta, cfg.tolerance));
  }

  auto settles = [](const std::vector<double>& seq) {
    const std::size_t n = seq.size();
    const double last = std::abs(seq[n - 1] - seq[n - 2]);
    const double prev = std::abs(seq[n - 2] - seq[n - 3]);
    return last <= 1e-12 || last <= 0.5 * prev;
  };
  rep.divergent = !settles(rep.upper_arc) || !settles(rep.lower_arc);
  rep.defect = rep.divergent ? std::numeric_limits<double>::infinity()
                             : std::abs(rep.upper_arc.back() + rep.lower_arc.back()) /
                                   rep.multiplier;

  // Near theta = 0 and pi the upper integrand behaves like f v / |theta - end|,
  // so the arc integral tracks the csc antiderivative scaled by those weights.
  std::vector<double> log_eta;
  std::vector<double> predicted;
  const double endpoint_weight = 0.5 * (weight(0.0) * v(0.0) + weight(kPi) * v(kPi));
  for (double eta : cfg.cutoffs) {
    log_eta.push_back(std::log(eta));
    predicted.push_back(endpoint_weight * 2.0 * std::log(1.0 / std::tan(eta / 2.0)));
  }
  rep.measured_slope = least_squares_slope(log_eta, rep.upper_arc);
  rep.predicted_slope = least_squares_slope(log_eta, predicted);

  const double eta = cfg.cutoffs.back();
  auto arc = [&](const char* name, double lo, double hi, double mid) {
    BranchProfile b{name, make_grid(lo, hi, cfg.arc_points), Eigen::VectorXd(cfg.arc_points)};
    for (Eigen::Index k = 0; k < b.grid.size(); ++k) {
      const double t = b.grid[k];
      b.values[k] = integrate_adaptive(integrand, mid, t, cfg.tolerance) / weight(t);
    }
    return b;
  };
  rep.upper_solution = arc("upper", eta, kPi - eta, kPi / 2.0);
  rep.lower_solution = arc("lower", kPi + eta, 2.0 * kPi - eta, 1.5 * kPi);
  return rep;
}

}  // namespace foliate
