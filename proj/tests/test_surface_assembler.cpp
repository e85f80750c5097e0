#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "case_matrix.hpp"
#include "rlw/errors.hpp"
#include "rlw/surface_assembler.hpp"

using namespace rlw;
using doctest::Approx;
using WR = WeingartenRelation;

namespace {

struct RecipeCase {
  Recipe recipe;
  double lambda;
  double c1;
  Topology topology;
};

const RecipeCase kRecipes[] = {
    {Recipe::C1_1, -1, 0.5, Topology::SphereLike},
    {Recipe::C1_2, -1, 0.5, Topology::SphereLike},
    {Recipe::C2, -1, 1.0, Topology::Cylinder},
    {Recipe::C3, -1, 1.5, Topology::PeriodicTube},
    {Recipe::C4, 1, 0.3, Topology::PeriodicTube},
    {Recipe::C5, -0.5, 0.5, Topology::SphereLike},
    {Recipe::C6, -0.5, 1.0 / (0.5 * std::sqrt(0.5)), Topology::Cylinder},
    {Recipe::C7, -0.5, 3.0, Topology::PeriodicTube},
    {Recipe::C8, -2, -0.3, Topology::SphereLike},
    {Recipe::C9, -2, -0.25, Topology::Cylinder},
    {Recipe::C10, -2, -0.1, Topology::PeriodicTube},
    {Recipe::Torus4iii, 0, 2, Topology::Torus},
};

AssembledSurface build(const RecipeCase& rc, int m = 2) {
  RecipeParams prm;
  prm.p = NormParameter(m);
  prm.lambda = rc.lambda;
  prm.c1 = rc.c1;
  return assemble(rc.recipe, prm);
}

void check_junction(const Junction& j) {
  CHECK(j.value_gap < 1e-10);
  CHECK(j.slope_gap < 1e-8);
  if (j.smoothness == Smoothness::C2 || j.smoothness == Smoothness::C2WithCurvatureJump) {
    REQUIRE(j.d2_left.exists);
    REQUIRE(j.d2_right.exists);
    CHECK(std::abs(j.d2_left.value - j.d2_right.value) < 1e-4);
  }
}

}  // namespace

TEST_CASE("axis smoothness table") {
  const NormParameter p(2);
  auto v = axis_smoothness(p, CaseTag::C5ii, -1.0);
  CHECK(v.u2_limit_exists);
  CHECK(v.curvatures_extend);
  v = axis_smoothness(p, CaseTag::C5ii, -0.2);
  CHECK(!v.u2_limit_exists);
  CHECK(!v.curvatures_extend);
  v = axis_smoothness(p, CaseTag::C5ii, -1.0 / 3.0);
  CHECK(v.u2_limit_exists);
  CHECK(!v.curvatures_extend);
  v = axis_smoothness(p, CaseTag::C61i_1, -1.0);
  CHECK(v.u2_limit_exists);
  CHECK(!v.curvatures_extend);
  v = axis_smoothness(p, CaseTag::C4ii, 0.0);
  CHECK(v.u2_limit_exists);
  CHECK(v.curvatures_extend);
  CHECK_THROWS_AS(axis_smoothness(p, CaseTag::C5i_1, 0.5), PreconditionError);
  CHECK_THROWS_AS(axis_smoothness(p, CaseTag::C63ii_2, 1.0), PreconditionError);
}

TEST_CASE("recipes glue with continuous value and slope") {
  for (int m : {2, 3}) {
    for (const auto& rc : kRecipes) {
      CAPTURE(m);
      CAPTURE(to_string(rc.recipe));
      const auto s = build(rc, m);
      CHECK(s.topology == rc.topology);
      CHECK(s.branches.size() == s.junctions.size() + 1);
      for (const auto& j : s.junctions) check_junction(j);
      if (s.closure) check_junction(*s.closure);
      if (rc.recipe != Recipe::C1_1) {
        for (const auto& j : s.junctions) CHECK(j.smoothness == Smoothness::C2);
      }
    }
  }
}

TEST_CASE("C1-1 has a curvature jump at the cap") {
  const auto s = build(kRecipes[0]);
  int jumps = 0;
  for (const auto& j : s.junctions) {
    if (j.smoothness != Smoothness::C2WithCurvatureJump) continue;
    ++jumps;
    CHECK(j.k1_jump == Approx(2.0).epsilon(1e-6));
    CHECK(!j.relation_preserved);
  }
  CHECK(jumps == 2);
}

TEST_CASE("axis points by topology") {
  for (const auto& rc : kRecipes) {
    CAPTURE(to_string(rc.recipe));
    const auto s = build(rc);
    if (s.topology == Topology::SphereLike) {
      REQUIRE(s.axis_points.size() == 2);
      CHECK(s.axis_points[0].u == Approx(-s.axis_points[1].u).epsilon(1e-9));
      for (const auto& a : s.axis_points) {
        CHECK(a.analytic.u2_limit_exists == a.numeric.u2_limit_exists);
        CHECK(a.analytic.curvatures_extend == a.numeric.curvatures_extend);
      }
    } else {
      CHECK(s.axis_points.empty());
    }
  }
}

TEST_CASE("torus closes with k1 = 1") {
  const auto s = build(kRecipes[11]);
  CHECK(s.topology == Topology::Torus);
  CHECK(!s.period);
  REQUIRE(s.closure);
  CHECK(s.closure->smoothness == Smoothness::C2);
  for (const auto& j : s.junctions) {
    REQUIRE(j.k1_left.exists);
    CHECK(std::abs(std::abs(j.k1_left.value) - 1.0) < 1e-6);
  }
  const auto t = extend_periodic(s);
  CHECK(t.topology == Topology::Torus);
  CHECK(t.junctions.size() == s.junctions.size());
  const auto line = profile_polyline(s);
  CHECK((line.front() - line.back()).norm() < 1e-9);
}

TEST_CASE("periodic tube repeats by its period") {
  const auto s = build(kRecipes[3]);
  REQUIRE(s.period);
  const auto one = profile_polyline(s, 1);
  const auto two = profile_polyline(s, 2);
  CHECK(two.size() > one.size());
  CHECK(two.back().x() == Approx(one.back().x()).epsilon(1e-12));
  CHECK(two.back().y() - one.back().y() == Approx(*s.period).epsilon(1e-9));
  CHECK(std::abs(one.back().y() - one.front().y() - *s.period) < 1e-9);
}

TEST_CASE("mismatched recipes are rejected") {
  const auto b = solve(test::make_request(2, WR::inhomogeneous(-1.0, 1.0), 0.5));
  CHECK_THROWS_AS(glue(b, b, Recipe::C1_1), GluingMismatch);
  const auto h = solve(test::make_request(2, WR::homogeneous(0.5), 1.0));
  CHECK_THROWS_AS(glue(h, h, Recipe::Cap), GluingMismatch);
  RecipeParams prm;
  prm.mu = -1.0;
  CHECK_THROWS_AS(assemble(Recipe::C2, prm), PreconditionError);
  CHECK_THROWS_AS(assemble(Recipe::Cap, RecipeParams{}), PreconditionError);
}

TEST_CASE("non-periodic surfaces cannot be extended") {
  const auto s = build(kRecipes[2]);
  CHECK_THROWS_AS(extend_periodic(s), NotPeriodic);
  const auto br = assemble_branch(solve(test::make_request(2, WR::homogeneous(0.5), 1.0)));
  CHECK_THROWS_AS(extend_periodic(br), NotPeriodic);
}

TEST_CASE("cap recipes") {
  auto req = test::make_request(2, WR::homogeneous(1.0 / 3.0), 1.0, 1, 0.7);
  auto s = assemble_cap(req);
  CHECK(s.topology == Topology::OpenAnnulus);
  REQUIRE(s.junctions.size() == 1);
  CHECK(s.junctions[0].smoothness == Smoothness::C2);
  check_junction(s.junctions[0]);

  s = assemble_cap(test::make_request(2, WR::k2_const(-1.0), 0.0));
  CHECK(s.topology == Topology::SphereLike);
  CHECK(s.axis_points.size() == 2);

  s = assemble_cap(test::make_request(2, WR::inhomogeneous(1.0, -1.0), 0.2));
  CHECK(s.topology == Topology::PeriodicTube);
  REQUIRE(s.closure);
  CHECK(s.closure->slope_gap < 1e-8);
  CHECK(s.axis_points.empty());

  s = assemble_cap(test::make_request(2, WR::homogeneous(-1.5), 1.0));
  CHECK(s.topology == Topology::SphereLike);
}

TEST_CASE("single branch topology") {
  auto s = assemble_branch(solve(test::make_request(2, WR::homogeneous(-1.0), 1.0)));
  CHECK(s.topology == Topology::Disk);
  CHECK(s.axis_points.size() == 1);
  s = assemble_branch(solve(test::make_request(2, WR::homogeneous(0.5), 1.0)));
  CHECK(s.topology == Topology::OpenAnnulus);
  CHECK(s.junctions.empty());
}

TEST_CASE("recipe labels round trip") {
  for (const auto& rc : kRecipes) CHECK(recipe_from_string(to_string(rc.recipe)) == rc.recipe);
  CHECK(recipe_from_string("Cap") == Recipe::Cap);
  CHECK(!recipe_from_string("C11"));
}
