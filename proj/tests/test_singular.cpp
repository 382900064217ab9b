#include <doctest.h>

#include <foliate/errors.hpp>
#include <foliate/singular.hpp>

#include <cmath>
#include <numbers>

#include "support.hpp"

using namespace foliate;
constexpr double kPi = std::numbers::pi;

namespace {

// Branch formulas for v = 1, integrated by hand.
double unit_solution(double x) {
  if (x == 0.0) return 1.0;
  if (x >= 1.0) return (x - 1.0 + std::exp(1.0 - x) - std::exp(-x)) / x;
  if (x > 0.0) return -std::expm1(-x) / x;
  if (x > -1.0) return std::expm1(x) / x;
  return (x + 1.0 - std::exp(1.0 + x) + std::exp(x)) / x;
}

}  // namespace

TEST_CASE("phi is the clipped identity") {
  CHECK(phi(3.0) == 1.0);
  CHECK(phi(0.25) == 0.25);
  CHECK(phi(-7.0) == -1.0);
}

TEST_CASE("constant input on the singular line") {
  const Eigen::VectorXd grid = make_grid(-50.0, 50.0, 10001);
  const auto one = LeafFunction::constant(1.0);
  const auto sol = singular_line_solve(one, grid);
  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    CHECK(std::abs(sol.values[k] - unit_solution(grid[k])) < 1e-10);
  }
  CHECK(sol.values.cwiseAbs().maxCoeff() <= 3.0 + 1e-6);
  CHECK(sol.max_gap() <= 1e-6);
  CHECK(std::abs(singular_line_value(one, 1e-6) - 1.0) < 1e-5);
  CHECK(std::abs(singular_line_value(one, -1e-6) - 1.0) < 1e-5);
  CHECK(singular_line_residual(sol, one) < 1e-6);
  CHECK(sol.u1.name == "u1");
  CHECK(sol.u2.grid[0] == 1.0);
  CHECK(sol.u4.grid[sol.u4.grid.size() - 1] == -1.0);
}

TEST_CASE("property: trigonometric inputs give continuous, small-residual solutions") {
  testing::Gen g(8);
  const Eigen::VectorXd grid = make_grid(-8.0, 8.0, 3201);
  for (int trial = 0; trial < 6; ++trial) {
    const auto v = LeafFunction::trigonometric(g.uniform(1.0, 6.0), g.coefficients(3, 1.0),
                                               g.coefficients(3, 1.0));
    const auto sol = singular_line_solve(v, grid);
    CHECK(sol.max_gap() <= 1e-6);
    CHECK(singular_line_residual(sol, v) < 1e-6);
    CHECK(sol.values.cwiseAbs().maxCoeff() <= 3.0 * v.bound() + 1e-9);
    CHECK(sol.values[1600] == doctest::Approx(v(0.0)).epsilon(1e-12));
  }
}

TEST_CASE("single point values agree with the grid solve") {
  const auto v = LeafFunction::sine();
  const Eigen::VectorXd grid = make_grid(-4.0, 4.0, 81);
  const auto sol = singular_line_solve(v, grid);
  for (Eigen::Index k = 0; k < grid.size(); k += 7) {
    CHECK(singular_line_value(v, grid[k]) == doctest::Approx(sol.values[k]).epsilon(1e-12));
  }
}

TEST_CASE("grid must contain the junctions") {
  CHECK_THROWS_AS(singular_line_solve(LeafFunction::constant(1.0), make_grid(-2.0, 2.0, 40)), ConfigError);
  Eigen::VectorXd coarse(5);
  coarse << -2, -1, 0, 1, 2;
  const auto sol = singular_line_solve(LeafFunction::constant(1.0), coarse);
  CHECK_THROWS_AS(singular_line_residual(sol, LeafFunction::constant(1.0)), DomainError);
}

TEST_CASE("naive formulations blow up") {
  const auto demos = naive_singular_demos();
  REQUIRE(demos.size() == 3);
  for (const auto& d : demos) {
    REQUIRE(d.samples.size() >= 2);
    CHECK(std::abs(d.samples.back().u) > std::abs(d.samples.front().u));
  }
  CHECK(demos[0].samples.back().u == doctest::Approx(std::log(1e-6)));
  CHECK(demos[1].peak == doctest::Approx(50.0));
}

TEST_CASE("circle obstruction for constant input") {
  const auto r = circle_obstruction(LeafFunction::constant(1.0));
  CHECK(r.divergent);
  CHECK(std::isinf(r.defect));
  // f v / sin integrates to ln tan(theta / 2); each arc grows like -2 ln eta.
  // Fitted on the finite cutoffs, so it carries an O(eta^2) offset.
  CHECK(r.predicted_slope == doctest::Approx(-2.0).epsilon(1e-4));
  CHECK(std::abs(r.measured_slope - r.predicted_slope) <= 0.2 * std::abs(r.predicted_slope));
  for (std::size_t k = 0; k < r.cutoffs.size(); ++k) {
    const double eta = r.cutoffs[k];
    const double exact = 2.0 * std::log(1.0 / std::tan(eta / 2.0));
    CHECK(r.upper_arc[k] == doctest::Approx(exact).epsilon(1e-10));
    CHECK(r.lower_arc[k] == doctest::Approx(-exact).epsilon(1e-10));
  }
}

TEST_CASE("circle obstruction for zero and for sine") {
  CHECK(circle_obstruction(LeafFunction::constant(0.0)).defect <= 1e-12);
  const auto s = circle_obstruction(LeafFunction::sine());
  CHECK_FALSE(s.divergent);
  // sin / sin = 1 on both arcs, so each contributes pi - 2 eta.
  CHECK(s.defect == doctest::Approx(2.0 * (kPi - 2.0 * 1e-4)).epsilon(1e-10));
  CHECK_THROWS_AS(circle_obstruction(LeafFunction::trigonometric(3.0, {0.0, 1.0}, {0.0, 0.0})), KindError);
  ObstructionConfig bad;
  bad.cutoffs = {1e-2, 1e-3};
  CHECK_THROWS_AS(circle_obstruction(LeafFunction::constant(1.0), bad), ConfigError);
}

TEST_CASE("weighted obstruction scales by the multiplier") {
  ObstructionConfig cfg;
  cfg.kappa = 0.1;
  const auto r = circle_obstruction(LeafFunction::sine(), cfg);
  CHECK(r.multiplier == doctest::Approx(std::exp(2.0 * kPi * 0.1)));
  const auto w = [](double t) { return std::exp(0.1 * t); };
  const double upper = testing::simpson(w, 1e-4, kPi - 1e-4, 2000);
  const double lower = testing::simpson(w, kPi + 1e-4, 2.0 * kPi - 1e-4, 2000);
  CHECK(r.defect == doctest::Approx(std::abs(upper + lower) / r.multiplier).epsilon(1e-9));
}
