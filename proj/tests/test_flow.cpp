#include <doctest.h>

#include <foliate/errors.hpp>
#include <foliate/flow.hpp>

#include <cmath>
#include <numbers>

#include "support.hpp"

using namespace foliate;
constexpr double kPi = std::numbers::pi;
using Profile = ScalarField::Profile;

namespace {

WorkingRegion long_box() { return WorkingRegion::box(Eigen::Vector2d(-40.0, -5.0), Eigen::Vector2d(10.0, 5.0)); }
WorkingRegion square(double a) { return WorkingRegion::box(Eigen::Vector2d(-a, -a), Eigen::Vector2d(a, a)); }

}  // namespace

TEST_CASE("ridge fields and their derivatives") {
  Eigen::VectorXd k(2);
  k << 0.5, -1.5;
  const ScalarField f(2, {{2.0, Profile::sine, k, 0.3}, {-1.0, Profile::tanh, k, 0.0}});
  const Eigen::Vector2d x(0.2, 0.7);
  const double z = k.dot(x);
  CHECK(f(x) == doctest::Approx(2.0 * std::sin(z + 0.3) - std::tanh(z)));
  const Eigen::VectorXd grad = f.gradient(x);
  const double h = 1e-6;
  for (int i = 0; i < 2; ++i) {
    Eigen::Vector2d e = Eigen::Vector2d::Zero();
    e[i] = h;
    CHECK(grad[i] == doctest::Approx((f(x + e) - f(x - e)) / (2.0 * h)).epsilon(1e-8));
  }
  for (const auto prof : {Profile::sine, Profile::cosine, Profile::tanh, Profile::linear}) {
    for (int order = 1; order <= 3; ++order) {
      const double fd = (profile_derivative(prof, 0.4 + h, order - 1) -
                         profile_derivative(prof, 0.4 - h, order - 1)) / (2.0 * h);
      CHECK(profile_derivative(prof, 0.4, order) == doctest::Approx(fd).epsilon(1e-7));
    }
  }
  const WorkingRegion box = square(1.0);
  CHECK(f.bound_over(box) >= 2.0);
  CHECK(ScalarField::constant(2, 0.0).is_zero());
}

TEST_CASE("rotation flow is exact") {
  const FlowMap flow(FlowField::rotation(square(3.0), 0.5));
  testing::Gen g(3);
  for (int trial = 0; trial < 20; ++trial) {
    const double r = g.uniform(0.6, 2.9);
    const double a = g.uniform(-kPi, kPi);
    const double t = g.uniform(-10.0, 10.0);
    const Eigen::VectorXd p = flow.flow(Eigen::Vector2d(r * std::cos(a), r * std::sin(a)), t);
    CHECK((p - Eigen::Vector2d(r * std::cos(a + t), r * std::sin(a + t))).norm() < 1e-10);
  }
  const Eigen::Vector2d x(1.0, 0.4);
  CHECK((flow.flow(x, 0.0) - x).norm() == 0.0);
}

TEST_CASE("trajectory table agrees with single flows") {
  const FlowMap flow(FlowField::rotation(square(3.0), 0.5), false);
  Eigen::ArrayXd depths(4);
  depths << 0.0, 0.0125, 1.0, 3.3335;
  const Eigen::Vector2d x(1.5, 0.0);
  const Eigen::MatrixXd traj = flow.trajectory_back(x, depths);
  for (int j = 0; j < 4; ++j) {
    const Eigen::Vector2d want(1.5 * std::cos(-depths[j]), 1.5 * std::sin(-depths[j]));
    CHECK((traj.col(j) - want).norm() < 1e-10);
  }
}

TEST_CASE("leaving the working region reports the exit time") {
  const FlowMap flow(FlowField::translation(square(1.0)));
  try {
    flow.flow(Eigen::Vector2d(0.5, 0.0), -3.0);
    FAIL("expected EscapeError");
  } catch (const EscapeError& e) {
    CHECK(e.exit_time() == doctest::Approx(-1.5).epsilon(1e-2));
  }
}

TEST_CASE("stationary points are rejected") {
  std::vector<ScalarField> comps{ScalarField::axis(2, 1, -1.0, Profile::linear),
                                 ScalarField::axis(2, 0, 1.0, Profile::linear)};
  CHECK_THROWS_AS(FlowField(comps, square(1.0), 1e-3), DomainError);
  CHECK_NOTHROW(FlowField(comps, square(1.0).with_hole(Eigen::Vector2d::Zero(), 0.3), 0.2));
}

TEST_CASE("field solutions against closed forms") {
  const OperatorConfig cfg;
  const FlowMap trans(FlowField::translation(long_box()));
  const ScalarField s = ScalarField::axis(2, 0, 1.0, Profile::sine);
  for (double x : {-1.0, 0.0, 0.7, 2.0}) {
    CHECK(std::abs(solve_field(trans, s, Eigen::Vector2d(x, 0.3), cfg) - testing::damped_sin(1.0, x)) < 1e-9);
  }
  CHECK(std::abs(solve_field(trans, ScalarField::constant(2, 1.0), Eigen::Vector2d(0.0, 0.0), cfg) - 1.0) < 1e-9);

  // V = x under rotation: U = (x + y) / 2.
  const FlowMap rot(FlowField::rotation(square(3.0), 0.5));
  const ScalarField xs = ScalarField::axis(2, 0, 1.0, Profile::linear);
  for (const Eigen::Vector2d p : {Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(-0.8, 1.1)}) {
    CHECK(std::abs(solve_field(rot, xs, p, cfg) - 0.5 * (p.x() + p.y())) < 1e-8);
    CHECK(field_residual(rot, xs, p, 1e-3, cfg) < 1e-6);
  }
}

TEST_CASE("derivatives under the integral match differences") {
  const OperatorConfig cfg;
  const FlowMap trans(FlowField::translation(long_box()));
  const ScalarField s = ScalarField::axis(2, 0, 1.0, Profile::sine);
  const Eigen::Vector2d x(kPi / 2.0, 0.1);
  CHECK(solve_field_derivative(trans, s, x, 0, cfg, 1) ==
        doctest::Approx(0.5 * (std::cos(x.x()) + std::sin(x.x()))).epsilon(1e-8));
  CHECK(solve_field_derivative(trans, s, x, 0, cfg, 2) ==
        doctest::Approx(0.5 * (-std::sin(x.x()) + std::cos(x.x()))).epsilon(1e-7));
  CHECK(std::abs(solve_field_derivative(trans, s, x, 1, cfg, 1)) < 1e-9);

  const auto rep = smoothness_order_check(trans, s, x, 0, 2, cfg);
  REQUIRE(rep.orders.size() == 2);
  for (const auto& o : rep.orders) {
    CHECK_FALSE(o.exact);
    CHECK(o.estimated_order >= 1.7);
    CHECK(o.estimated_order <= 2.3);
  }
}

TEST_CASE("linear input makes difference checks exact") {
  const OperatorConfig cfg;
  const FlowMap trans(FlowField::translation(long_box()));
  const ScalarField lin = ScalarField::axis(2, 0, 0.1, Profile::linear);
  const auto rep = smoothness_order_check(trans, lin, Eigen::Vector2d(0.0, 0.0), 0, 2, cfg);
  for (const auto& o : rep.orders) CHECK((o.exact || o.noise_floor));
}

TEST_CASE("cache does not change results") {
  const OperatorConfig cfg;
  const FlowMap cached(FlowField::rotation(square(3.0), 0.5), true);
  const FlowMap plain(FlowField::rotation(square(3.0), 0.5), false);
  const ScalarField v = ScalarField::axis(2, 1, 1.0, Profile::cosine);
  const Eigen::Vector2d p(1.2, 0.3);
  const double a = solve_field(cached, v, p, cfg);
  const double b = solve_field(cached, v, p, cfg);
  CHECK(a == b);
  CHECK(a == solve_field(plain, v, p, cfg));
  const Eigen::VectorXd q = cached.flow(p, 0.5);
  CHECK(cached.flow(p, 0.5) == q);
  CHECK(q == plain.flow(p, 0.5));
  CHECK(cached.cache_size() == 1);
  CHECK(plain.cache_size() == 0);
}
