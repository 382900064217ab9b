#include <doctest.h>

#include <foliate/bundle.hpp>
#include <foliate/errors.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "support.hpp"

using namespace foliate;
constexpr double kPi = std::numbers::pi;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::filesystem::path kSource = FOLIATE_SOURCE_DIR;

}  // namespace

TEST_CASE("built-in covers satisfy the cocycle conditions") {
  for (const auto& cover : {circle_cover(), circle_cover(0.3), torus_cover(), torus_cover(0.2)}) {
    const auto r = verify_cocycle(cover);
    CHECK(r.max_deviation() <= 1e-12);
    CHECK(r.weight_deviation <= 1e-12);
  }
  const auto c = circle_cover();
  CHECK(*c.transition("lower", "upper") == doctest::Approx(std::exp(-2.0 * kPi)));
  CHECK(*c.transition("upper", "upper") == 1.0);
}

TEST_CASE("shipped cover files") {
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(kSource / "data" / "covers")) {
    const auto doc = parse_cover(slurp(entry.path()));
    CHECK(verify_cocycle(doc.cover).max_deviation() <= 1e-12);
    ++seen;
  }
  CHECK(seen >= 3);
}

TEST_CASE("inconsistent triple is flagged") {
  const auto doc = parse_cover(slurp(kSource / "tests" / "fixtures_inconsistent.cover"));
  const auto r = verify_cocycle(doc.cover);
  CHECK(r.triples_checked == 1);
  CHECK(r.triple_deviation == doctest::Approx(1.0));
  CHECK_FALSE(r.consistent());
}

TEST_CASE("cover parsing errors") {
  CHECK_THROWS_AS(parse_cover("box a 0 1 exp\nbox b 0.5 2 exp\noverlap a b 0.5 1\n"), StructuralError);
  CHECK_THROWS_AS(parse_cover("box a 0 1 sideways\n"), StructuralError);
  CHECK_THROWS_AS(parse_cover("shape a\n"), StructuralError);
  CHECK_THROWS_AS(parse_cover("box a 0 1 exp\noverlap a ghost 0 1 1\n"), StructuralError);
  CHECK_THROWS_AS(parse_cover("box a 0 1 exp\nbox a 1 2 exp\n"), StructuralError);
  CHECK_THROWS_AS(parse_cover("box a 0 1 exp\nbox b 0 1 exp\noverlap a b 0 1 -2\n"), StructuralError);
  const auto doc = parse_cover("# comment\nbox a 0 2 exp  # trailing\nbox b 1 3 exp\noverlap a b 1 2 exp:0\ndata a sin\n");
  CHECK(doc.cover.boxes().size() == 2);
  CHECK(doc.data.at("a") == "sin");
}

TEST_CASE("circle bundle: periodic trivialized section") {
  GlueConfig cfg;
  const std::vector<LeafFunction> catalog{
      LeafFunction::constant(1.0), LeafFunction::sine(), LeafFunction::cosine(),
      LeafFunction::trigonometric(2.0 * kPi, {0.1, 0.5, 0.0}, {0.0, 0.3, 0.2})};
  for (const auto& v : catalog) {
    const auto s = circle_bundle_solve(v, cfg);
    REQUIRE(s.periodicity_defect.has_value());
    CHECK(*s.periodicity_defect <= 2e-9);
    CHECK(s.max_mismatch() <= 1e-12);
  }
  const auto s = circle_bundle_solve(LeafFunction::cosine(), cfg);
  const auto& upper = s.box("upper");
  for (Eigen::Index k = 0; k < upper.grid.size(); k += 10) {
    CHECK(std::abs(upper.trivial[k] - testing::damped_cos(1.0, upper.grid[k])) < 1e-9);
    CHECK(upper.local[k] == doctest::Approx(upper.trivial[k] * std::exp(upper.grid[k])));
  }
  CHECK_THROWS_AS(circle_bundle_solve(LeafFunction::trigonometric(1.0, {0.0, 1.0}, {0.0, 0.0}), cfg),
                  KindError);
}

TEST_CASE("torus bundle") {
  const auto v = PlaneFunction::torus(0.1, {{1.0, 1, 0, false}, {0.5, 1, -1, true}});
  const auto s = torus_bundle_solve(v, {0.0, 0.7}, GlueConfig{});
  REQUIRE(s.periodicity_defect.has_value());
  CHECK(*s.periodicity_defect <= 2e-9);
  CHECK(s.max_mismatch() <= 1e-12);
  CHECK(s.boxes.size() == 4);
}

TEST_CASE("glue_general checks its data") {
  const auto cover = parse_cover(slurp(kSource / "data" / "covers" / "line_chain.cover")).cover;
  GlueConfig cfg;
  const auto good = glue_general(cover, {{"A", LeafFunction::cosine()}, {"B", LeafFunction::cosine()},
                                         {"C", LeafFunction::cosine()}}, cfg);
  CHECK(good.max_mismatch() <= 1e-12);
  try {
    glue_general(cover, {{"A", LeafFunction::cosine()}, {"B", LeafFunction::sine()},
                         {"C", LeafFunction::cosine()}}, cfg);
    FAIL("expected InputDataError");
  } catch (const InputDataError& e) {
    CHECK(std::string(e.what()).find("A") != std::string::npos);
  }
  CHECK_THROWS_AS(glue_general(cover, {{"A", LeafFunction::cosine()}}, cfg), StructuralError);
}

TEST_CASE("property: transport is multiplicative") {
  testing::Gen g(99);
  for (int trial = 0; trial < 100; ++trial) {
    const double u = g.uniform(-5.0, 5.0);
    const double a = std::exp(g.uniform(-3.0, 3.0));
    const double b = std::exp(g.uniform(-3.0, 3.0));
    CHECK(transport(transport(u, a), b) == doctest::Approx(transport(u, a * b)).epsilon(1e-14));
    CHECK(transport(transport(u, a), 1.0 / a) == doctest::Approx(u).epsilon(1e-14));
  }
}

TEST_CASE("annulus section") {
  const AnnulusFunction v({{1.0, 1, AnnulusFunction::Mode::cosine, 1},
                           {-1.0, 0, AnnulusFunction::Mode::cosine, 1}});
  const auto sec = annulus_bundle_solve(v, {-0.5, 0.0, 0.5}, make_grid(-4.0, 4.0, 401), {});
  CHECK(sec.spirals.size() == 3);
  CHECK(sec.neighbour_deltas.size() == 2);
  CHECK(std::isnan(sec.inner.s));
  CHECK(sec.lipschitz_estimate < 10.0);
  for (const auto& l : sec.spirals) CHECK(l.profile.residual_sup < 1e-6);
  CHECK(sec.inner_gaps.size() == 3);
}
