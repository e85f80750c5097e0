#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rlw/profile_solver.hpp"
#include "rlw/verifier.hpp"

namespace rlw {

enum class Recipe { Cap, C1_1, C1_2, C2, C3, C4, C5, C6, C7, C8, C9, C10, Torus4iii };
enum class Smoothness { C1, C2, C2WithCurvatureJump, Singular };
enum class Topology { Disk, SphereLike, Torus, PeriodicTube, OpenAnnulus, Cylinder };

std::string to_string(Recipe recipe);
std::string to_string(Smoothness s);
std::string to_string(Topology t);
std::optional<Recipe> recipe_from_string(std::string_view label);

struct OneSidedLimit {
  bool exists = false;
  double value = 0.0;
  double error = 0.0;
};

struct Junction {
  double alpha_star = 0.0;
  std::size_t left = 0;
  std::size_t right = 0;
  int left_flag = 1;
  int right_flag = 1;
  bool inverted_chart = false;  // compared as alpha(u) at a root
  double radius_gap = 0.0;
  double value_gap = 0.0;
  double slope_gap = 0.0;
  OneSidedLimit d2_left, d2_right;
  OneSidedLimit k1_left, k1_right;
  double k1_jump = 0.0;
  double relation_left = 0.0;  // oriented k1 + lambda k2 next to the junction
  double relation_right = 0.0;
  bool relation_preserved = true;
  double shift = 0.0;  // u translation applied to the right branch
  Smoothness smoothness = Smoothness::C2;
};

struct AxisVerdict {
  bool u2_limit_exists = false;
  bool curvatures_extend = false;
};

struct AxisPoint {
  std::size_t branch = 0;
  double u = 0.0;
  AxisVerdict analytic;
  AxisLimitReport numeric;
};

struct NamedConstant {
  std::string name;
  double value = 0.0;
  double error = 0.0;
};

struct AssembledSurface {
  Recipe recipe = Recipe::Cap;
  std::vector<ProfileBranch> branches;  // in profile order
  std::vector<bool> reversed;           // traversed from upper to lower alpha
  std::vector<int> orientation;
  std::vector<Junction> junctions;
  Topology topology = Topology::OpenAnnulus;
  std::vector<AxisPoint> axis_points;
  std::vector<NamedConstant> d_values;
  bool periodic_candidate = false;
  std::optional<Junction> closure;  // last branch against the first, shifted by the period
  std::optional<double> period;
  bool may_be_torus = false;
  std::vector<std::string> warnings;
};

// Analytic axis verdicts; PreconditionError when the case has no axis endpoint.
AxisVerdict axis_smoothness(const NormParameter& p, CaseTag tag, double lambda);

// Cap: the two sign branches of one case.  Other recipes: a branch of the mu > 0 family and the
// mu < 0 branch meeting it at the common cap; the mirrored partners are built here.
AssembledSurface glue(const ProfileBranch& first, const ProfileBranch& second, Recipe recipe);

// Upgrades a periodic candidate to PeriodicTube (or Torus when the closure gap vanishes).
AssembledSurface extend_periodic(const AssembledSurface& surface);

struct RecipeParams {
  NormParameter p{2};
  double lambda = 1.0;
  double mu = 1.0;  // the first family has mu > 0, the second -mu
  double c1 = 0.5;
  double base = 0.0;  // additive constant of the second family
  int samples = 512;
};

// Builds both families with matching constants, glues them and extends periodic recipes.
AssembledSurface assemble(Recipe recipe, const RecipeParams& params);

// Cap assembly of one case (sign branches joined at the anchored root), extended when periodic.
AssembledSurface assemble_cap(const SolveRequest& req, std::size_t interval = 0);

// Single branch as a surface (no junctions).
AssembledSurface assemble_branch(const ProfileBranch& branch);

// Profile as (alpha, u) points in chain order; periodic surfaces repeat over the given number of periods.
std::vector<Eigen::Vector2d> profile_polyline(const AssembledSurface& surface, int periods = 1);

ProfileBranch solve_case(const SolveRequest& req, CaseTag tag);

}  // namespace rlw
