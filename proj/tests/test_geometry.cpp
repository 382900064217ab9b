#include <doctest.h>

#include <foliate/errors.hpp>
#include <foliate/finite_difference.hpp>
#include <foliate/geometry.hpp>

#include <cmath>
#include <numbers>

#include "support.hpp"

using namespace foliate;
constexpr double kPi = std::numbers::pi;
using Mode = AnnulusFunction::Mode;

namespace {

// Bounded solution for cos(w t + phase).
double damped_shifted_cos(double w, double phase, double t) {
  return (std::cos(w * t + phase) + w * std::sin(w * t + phase)) / (1.0 + w * w);
}

}  // namespace

TEST_CASE("torus leaf against the closed form") {
  const double offset = 0.37;
  const auto v = PlaneFunction::torus(0.25, {{1.0, 1, 0, false}, {-0.5, 0, 1, false}});
  const Eigen::VectorXd grid = make_grid(0.0, 1.0, 201);
  const auto p = torus_solve(v, offset, grid, {});
  const double s2 = std::numbers::sqrt2;
  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    const double t = grid[k];
    const double want = 0.25 + damped_shifted_cos(2.0 * kPi, 0.0, t) -
                        0.5 * damped_shifted_cos(2.0 * kPi * s2, 2.0 * kPi * offset, t);
    CHECK(std::abs(p.values[k] - want) < 1e-9);
  }
  CHECK(p.residual_sup <= 1e-6);
}

TEST_CASE("property: torus solutions are 1-periodic in x") {
  testing::Gen g(314);
  for (int trial = 0; trial < 12; ++trial) {
    std::vector<PlaneFunction::TorusTerm> terms;
    for (int k = 0; k < 3; ++k) {
      terms.push_back({g.uniform(-1.0, 1.0), g.integer(-2, 2), g.integer(-2, 2), g.integer(0, 1) == 1});
    }
    const auto v = PlaneFunction::torus(g.uniform(-1.0, 1.0), terms);
    const auto p = torus_solve(v, g.uniform(0.0, 1.0), make_grid(0.0, 1.0, 21), {});
    REQUIRE(p.periodicity_defect.has_value());
    CHECK(*p.periodicity_defect <= 2e-9);
  }
  const auto one = torus_solve(PlaneFunction::constant(1.0), 0.0, make_grid(0.0, 3.0, 31), {});
  CHECK((one.values.array() - 1.0).abs().maxCoeff() <= 1e-9);
}

TEST_CASE("torus solve rejects inputs without period one in x") {
  const PlaneFunction v([](double x, double) { return std::sin(x); }, 1.0, 2.0 * kPi, std::nullopt);
  CHECK_THROWS_AS(torus_solve(v, 0.0, make_grid(0.0, 1.0, 5), {}), KindError);
}

TEST_CASE("spiral radius and its limits") {
  CHECK(spiral_radius(0.0, 0.0) == 1.5);
  CHECK(spiral_radius(-1e9, 0.0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(spiral_radius(1e9, 0.0) == doctest::Approx(2.0).epsilon(1e-8));
  for (double th : {-3.0, -0.2, 0.0, 1.1, 7.0}) {
    const double fd = central_difference([](double t) { return spiral_radius(t, 0.4); }, th, 1e-3, 1, 2);
    CHECK(spiral_radius_slope(th, 0.4) == doctest::Approx(fd).epsilon(1e-9));
  }
}

TEST_CASE("chart round trip over a lattice") {
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 100; ++j) {
      const double th = 6.0 * kPi * (-1.0 + 2.0 * i / 99.0);
      const double s = (kPi - 0.01) * (-1.0 + 2.0 * j / 99.0);
      const Eigen::Vector2d p = chart_to_cartesian(th, s);
      const ChartPoint c = cartesian_to_chart(p.x(), p.y());
      worst = std::max({worst, std::abs(c.theta - th), std::abs(c.s - s)});
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("property: cartesian points survive the chart") {
  testing::Gen g(9);
  for (int trial = 0; trial < 500; ++trial) {
    const double r = g.uniform(1.01, 1.99);
    const double a = g.uniform(-kPi, kPi);
    const ChartPoint c = cartesian_to_chart(r * std::cos(a), r * std::sin(a));
    const Eigen::Vector2d back = chart_to_cartesian(c.theta, c.s);
    CHECK((back - Eigen::Vector2d(r * std::cos(a), r * std::sin(a))).norm() < 1e-12);
  }
  CHECK_THROWS_AS(cartesian_to_chart(0.9, 0.0), OutOfAnnulusError);
  CHECK_THROWS_AS(cartesian_to_chart(0.0, 2.0), OutOfAnnulusError);
}

TEST_CASE("induced field is tangent to the spiral through the point") {
  for (double th : {-4.0, 0.3, 2.5}) {
    const double s = -0.6;
    const Eigen::Vector2d p = chart_to_cartesian(th, s);
    const double h = 1e-4;
    const Eigen::Vector2d d = (chart_to_cartesian(th + h, s) - chart_to_cartesian(th - h, s)) / (2.0 * h);
    CHECK((induced_field_at(p.x(), p.y()) - d).norm() < 1e-7);
  }
}

TEST_CASE("spiral and circle solutions") {
  const Eigen::VectorXd grid = make_grid(-10.0, 10.0, 1001);
  const auto one = spiral_solve(AnnulusFunction::constant(1.0), 0.3, grid, {});
  CHECK((one.values.array() - 1.0).abs().maxCoeff() <= 1e-9);

  // v = cos(theta) does not see the radius, so the leaf solution is explicit.
  const AnnulusFunction c({{1.0, 0, Mode::cosine, 1}});
  const auto p = spiral_solve(c, 0.0, grid, {});
  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    CHECK(std::abs(p.values[k] - testing::damped_cos(1.0, grid[k])) < 1e-9);
  }

  const AnnulusFunction rc({{1.0, 1, Mode::cosine, 1}});
  const auto q = circle_solve(rc, 2.0, make_grid(-7.0, 7.0, 141), {});
  for (Eigen::Index k = 0; k < q.grid.size(); ++k) {
    CHECK(std::abs(q.values[k] - 2.0 * testing::damped_cos(1.0, q.grid[k])) < 1e-9);
  }
}

TEST_CASE("asymptotic gap is the spiral-circle difference") {
  const AnnulusFunction v({{1.0, 1, Mode::cosine, 1}, {-1.0, 0, Mode::cosine, 1}});
  const OperatorConfig cfg;
  for (double th : {-15.0, 12.0}) {
    Eigen::VectorXd at(1);
    at << th;
    const double spiral = spiral_solve(v, 0.0, at, cfg).values[0];
    const double circle = circle_solve(v, th < 0 ? 1.0 : 2.0, at, cfg).values[0];
    CHECK(asymptotic_gap(v, 0.0, th, cfg) == doctest::Approx(std::abs(spiral - circle)).epsilon(1e-12));
  }
  // r - 1 decays like 1/|theta| along the leaf, and so does the gap.
  CHECK(asymptotic_gap(v, 0.0, -300.0, cfg) < 1e-3);
  CHECK(asymptotic_gap(v, 0.0, -1000.0, cfg) < asymptotic_gap(v, 0.0, -100.0, cfg));
}

TEST_CASE("annulus function bound and evaluation") {
  const AnnulusFunction v({{0.5, 2, Mode::sine, 3}, {-1.0, 0, Mode::one, 0}});
  CHECK(v.bound() == doctest::Approx(3.0));
  CHECK(v(1.5, 0.2) == doctest::Approx(0.5 * 2.25 * std::sin(0.6) - 1.0));
}
