#include "rlw/surface_assembler.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "rlw/errors.hpp"

namespace rlw {

namespace {

using EK = EndpointKind;

struct RecipeInfo {
  Recipe recipe;
  const char* name;
  CaseTag first;
  CaseTag second;
  bool cross;
  bool periodic;
};

constexpr std::array<RecipeInfo, 12> kRecipes = {{
    {Recipe::C1_1, "C1-1", CaseTag::C61i_1, CaseTag::C61ii, false, false},
    {Recipe::C1_2, "C1-2", CaseTag::C61i_1, CaseTag::C61ii, true, false},
    {Recipe::C2, "C2", CaseTag::C61i_2_2, CaseTag::C61ii, true, false},
    {Recipe::C3, "C3", CaseTag::C61i_3_2, CaseTag::C61ii, true, true},
    {Recipe::C4, "C4", CaseTag::C63i, CaseTag::C63ii_3, true, true},
    {Recipe::C5, "C5", CaseTag::C63iii_1, CaseTag::C63iv_3, true, false},
    {Recipe::C6, "C6", CaseTag::C63iii_2_2, CaseTag::C63iv_3, true, false},
    {Recipe::C7, "C7", CaseTag::C63iii_3_2, CaseTag::C63iv_3, true, true},
    {Recipe::C8, "C8", CaseTag::C63v_3_1, CaseTag::C63vi, true, false},
    {Recipe::C9, "C9", CaseTag::C63v_3_2_2, CaseTag::C63vi, true, false},
    {Recipe::C10, "C10", CaseTag::C63v_3_3_2, CaseTag::C63vi, true, true},
    {Recipe::Torus4iii, "Torus4iii", CaseTag::C4iii_1, CaseTag::C4iii_2, true, true},
}};

const RecipeInfo& info(Recipe r) {
  for (const auto& e : kRecipes)
    if (e.recipe == r) return e;
  throw PreconditionError("recipe has no two-family description");
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

int sgn(double x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

// alpha where the branch takes u = offset.
double reference_alpha(const ProfileBranch& br) {
  switch (br.anchor) {
    case AnchorSide::Lower: return br.domain.lower;
    case AnchorSide::Upper: return br.domain.upper;
    case AnchorSide::ClosedForm:
      if (br.domain.upper_kind == EK::SimpleRoot) return br.domain.upper;
      return br.domain.lower;
  }
  return br.domain.lower;
}

EK kind_at(const ProfileBranch& br, double t) {
  return t == br.domain.lower ? br.domain.lower_kind : br.domain.upper_kind;
}

// Signed u-displacement of the + branch from its reference point to alpha = to.
Integral displacement(const ProfileBranch& br, double to) {
  const double from = reference_alpha(br);
  if (from == to) return {0.0, 0.0};
  const QuadratureResult r =
      integrate_singular(br.law.integrand(), Endpoint{from, kind_at(br, from)}, Endpoint{to, kind_at(br, to)}, 1e-12);
  if (!r.finite()) throw GluingMismatch("displacement to the junction diverges");
  return {r.value, r.error_estimate};
}

ProfileBranch mirror(const ProfileBranch& br, double offset) {
  ProfileBranch out = br;
  out.request.sign = -br.request.sign;
  out.request.offset = offset;
  out.u = offset - (br.u - br.request.offset);
  out.du = -br.du;
  out.u_lower = offset - (br.u_lower - br.request.offset);
  out.u_upper = offset - (br.u_upper - br.request.offset);
  return out;
}

void shift_branch(ProfileBranch& br, double delta) {
  br.request.offset += delta;
  br.u += delta;
  br.u_lower += delta;
  br.u_upper += delta;
}

struct Side {
  const ProfileBranch* br;
  bool at_upper;
  double shift;

  double end() const { return at_upper ? br->domain.upper : br->domain.lower; }
  int dir() const { return at_upper ? -1 : 1; }
  double width() const {
    const DomainInterval& d = br->domain;
    return std::isinf(d.upper) ? std::max(1.0, d.lower) : d.upper - d.lower;
  }
  double u() const { return br->u_at_endpoint(at_upper) + shift; }
};

double relation_value(const ProfileBranch& br, const PrincipalCurvatures<double>& k) {
  return br.request.relation.residual(k) + br.request.relation.mu;
}

PrincipalCurvatures<double> radial_raw(const ProfileBranch& br, double t, double h) {
  const double w = br.du_at(t);
  const double dw = central_difference([&](double x) { return br.du_at(x); }, t, h);
  return principal_curvatures(br.request.p, ProfileJet<double>{Chart::GraphOverRadius, 0.0, w, dw, t});
}

OneSidedLimit to_limit(const std::vector<double>& v) {
  const SequenceLimit l = sequence_limit(v);
  return {l.exists, l.value, l.gap};
}

Junction evaluate_junction(const Side& L, const Side& R, std::size_t li, std::size_t ri, int left_flag) {
  Junction j;
  j.left = li;
  j.right = ri;
  j.shift = R.shift;
  j.left_flag = left_flag;
  const double a = L.end();
  j.alpha_star = a;
  j.radius_gap = std::abs(L.end() - R.end());
  j.value_gap = std::abs(L.u() - R.u());
  const EK kind = kind_at(*L.br, a);
  j.inverted_chart = kind == EK::SimpleRoot;
  if (j.inverted_chart)
    j.slope_gap = std::abs(1.0 / L.br->du_at(a) - 1.0 / R.br->du_at(R.end()));
  else
    j.slope_gap = std::abs(L.br->du_at(a) - R.br->du_at(R.end()));

  const double d0 = 0.01 * std::min({L.width(), R.width(), std::max(a, 1e-3)});
  std::vector<double> d2l, d2r, k1l, k1r;
  for (int n = 0; n < 14; ++n) {
    const double d = d0 * std::ldexp(1.0, -n);
    const double h = d / 8;
    for (int side = 0; side < 2; ++side) {
      const Side& s = side == 0 ? L : R;
      const ProfileBranch& br = *s.br;
      const double t = s.end() + s.dir() * d;
      double d2, k1;
      if (j.inverted_chart) {
        const double r = 1.0 / br.du_at(t);
        const double dr = central_difference([&](double x) { return 1.0 / br.du_at(x); }, t, h);
        d2 = dr * r;
        k1 = fd_curvatures(br, t).k1;
      } else {
        d2 = central_difference([&](double x) { return br.du_at(x); }, t, h);
        k1 = radial_raw(br, t, h).k1;
      }
      (side == 0 ? d2l : d2r).push_back(d2);
      (side == 0 ? k1l : k1r).push_back(k1);
    }
  }
  j.d2_left = to_limit(d2l);
  j.d2_right = to_limit(d2r);
  j.k1_left = to_limit(k1l);
  j.k1_right = to_limit(k1r);
  j.k1_jump = std::abs(j.k1_left.value - j.k1_right.value);

  const double tl = L.end() + L.dir() * d0, tr = R.end() + R.dir() * d0;
  int flip = 1;
  if (!j.inverted_chart) flip = sgn(L.br->du_at(tl)) * sgn(R.br->du_at(tr));
  j.right_flag = left_flag * (flip == 0 ? 1 : flip);
  j.relation_left = j.left_flag * relation_value(*L.br, fd_curvatures(*L.br, tl));
  j.relation_right = j.right_flag * relation_value(*R.br, fd_curvatures(*R.br, tr));
  j.relation_preserved = std::abs(j.relation_left - j.relation_right) < 1e-6;

  const double d2_scale = std::max(1.0, std::abs(j.d2_left.value));
  if (j.slope_gap >= 1e-8 || !std::isfinite(j.slope_gap))
    j.smoothness = Smoothness::Singular;
  else if (!j.d2_left.exists || !j.d2_right.exists || std::abs(j.d2_left.value - j.d2_right.value) > 1e-4 * d2_scale)
    j.smoothness = Smoothness::C1;
  else if (!j.k1_left.exists || !j.k1_right.exists || j.k1_jump > 1e-3)
    j.smoothness = Smoothness::C2WithCurvatureJump;
  else
    j.smoothness = Smoothness::C2;
  return j;
}

void check_values(const Junction& j) {
  if (j.radius_gap > 1e-10 * std::max(1.0, j.alpha_star))
    throw GluingMismatch("junction radii differ by " + fmt(j.radius_gap));
  if (j.value_gap >= 1e-10) throw GluingMismatch("junction u-values differ by " + fmt(j.value_gap));
}

void add_axis_points(AssembledSurface& s) {
  for (std::size_t i = 0; i < s.branches.size(); ++i) {
    const ProfileBranch& br = s.branches[i];
    if (br.domain.lower_kind != EK::AxisZero) continue;
    AxisPoint ap;
    ap.branch = i;
    ap.u = br.u_lower;
    ap.analytic = axis_smoothness(br.request.p, br.tag, br.request.relation.lambda);
    ap.numeric = axis_limits(br);
    s.axis_points.push_back(ap);
  }
}

bool same_constants(const SolveRequest& a, const SolveRequest& b) {
  return a.p == b.p && a.relation.form == b.relation.form && a.relation.lambda == b.relation.lambda &&
         a.relation.mu == b.relation.mu && a.c1 == b.c1;
}

Topology end_topology(EK far) {
  switch (far) {
    case EK::AxisZero: return Topology::SphereLike;
    case EK::DoubleRoot: return Topology::Cylinder;
    default: return Topology::OpenAnnulus;
  }
}

AssembledSurface glue_cap(const ProfileBranch& bplus, const ProfileBranch& bminus) {
  if (bplus.tag != bminus.tag || !same_constants(bplus.request, bminus.request))
    throw GluingMismatch("cap gluing needs the two sign branches of one case");
  if (bplus.sign() != 1 || bminus.sign() != -1) throw GluingMismatch("cap gluing needs sign +1 and sign -1 branches");
  const DomainInterval& d = bplus.domain;
  bool root_upper;
  if (d.lower_kind == EK::SimpleRoot && d.upper_kind == EK::SimpleRoot)
    root_upper = reference_alpha(bplus) == d.upper;
  else if (d.upper_kind == EK::SimpleRoot)
    root_upper = true;
  else if (d.lower_kind == EK::SimpleRoot)
    root_upper = false;
  else
    throw GluingMismatch("cap gluing needs a simple-root endpoint");

  AssembledSurface s;
  s.recipe = Recipe::Cap;
  s.branches = {bminus, bplus};
  s.reversed = {!root_upper, root_upper};
  Junction j = evaluate_junction(Side{&s.branches[0], root_upper, 0.0}, Side{&s.branches[1], root_upper, 0.0}, 0, 1, 1);
  check_values(j);
  s.orientation = {1, j.right_flag};
  s.junctions.push_back(j);
  const EK far = root_upper ? d.lower_kind : d.upper_kind;
  s.topology = end_topology(far);
  if (far == EK::SimpleRoot) {
    s.periodic_candidate = true;
    const double period = s.branches[1].u_at_endpoint(!root_upper) - s.branches[0].u_at_endpoint(!root_upper);
    const Junction c = evaluate_junction(Side{&s.branches[1], !root_upper, 0.0}, Side{&s.branches[0], !root_upper, period}, 1, 0,
                          j.right_flag);
    s.closure = c;
    s.period = period;
  }
  if (far != EK::DoubleRoot && far != EK::Unbounded) {
    const Integral dv = displacement(bplus, root_upper ? d.lower : d.upper);
    s.d_values.push_back({"d", std::abs(dv.value), dv.error});
  }
  add_axis_points(s);
  return s;
}

}  // namespace

std::string to_string(Recipe recipe) {
  if (recipe == Recipe::Cap) return "Cap";
  return info(recipe).name;
}

std::optional<Recipe> recipe_from_string(std::string_view label) {
  if (label == "Cap") return Recipe::Cap;
  for (const auto& e : kRecipes)
    if (label == e.name) return e.recipe;
  return std::nullopt;
}

std::string to_string(Smoothness s) {
  switch (s) {
    case Smoothness::C1: return "C1";
    case Smoothness::C2: return "C2";
    case Smoothness::C2WithCurvatureJump: return "C2WithCurvatureJump";
    case Smoothness::Singular: return "Singular";
  }
  return "?";
}

std::string to_string(Topology t) {
  switch (t) {
    case Topology::Disk: return "Disk";
    case Topology::SphereLike: return "SphereLike";
    case Topology::Torus: return "Torus";
    case Topology::PeriodicTube: return "PeriodicTube";
    case Topology::OpenAnnulus: return "OpenAnnulus";
    case Topology::Cylinder: return "Cylinder";
  }
  return "?";
}

AxisVerdict axis_smoothness(const NormParameter& p, CaseTag tag, double lambda) {
  const bool u2 = p.odd() * (-lambda) >= 1.0 - 1e-12;
  switch (tag) {
    case CaseTag::C5ii: return {u2, -lambda >= 1.0 - 1e-12};
    case CaseTag::C61i_1:
    case CaseTag::C61i_2_1:
    case CaseTag::C61i_3_1: return {p.m() >= 2, false};
    case CaseTag::C63iii_1:
    case CaseTag::C63iii_2_1:
    case CaseTag::C63iii_3_1:
    case CaseTag::C63iv_2: return {u2, false};
    case CaseTag::C4ii:
    case CaseTag::C63ii_1:
    case CaseTag::C63iv_1:
    case CaseTag::C63v_1:
    case CaseTag::C63v_2:
    case CaseTag::C63v_3_1:
    case CaseTag::C63v_3_2_1:
    case CaseTag::C63v_3_3_1: return {true, true};
    case CaseTag::C4i:
    case CaseTag::C4iii_1:
    case CaseTag::C4iii_2: return {true, false};
    default: break;
  }
  throw PreconditionError("case " + std::string(to_string(tag)) + " has no axis endpoint");
}

ProfileBranch solve_case(const SolveRequest& req, CaseTag tag) {
  const Classification cls = classify(req);
  for (std::size_t i = 0; i < cls.intervals.size(); ++i)
    if (cls.intervals[i].tag == tag) return solve(req, i);
  throw PreconditionError("constants give case " + std::string(to_string(cls.primary())) + ", not " +
                          std::string(to_string(tag)));
}

AssembledSurface glue(const ProfileBranch& first, const ProfileBranch& second, Recipe recipe) {
  if (recipe == Recipe::Cap) return glue_cap(first, second);
  const RecipeInfo& ri = info(recipe);
  if (first.tag != ri.first)
    throw GluingMismatch(std::string(ri.name) + " needs case " + std::string(to_string(ri.first)) + " first, got " +
                         std::string(to_string(first.tag)));
  if (second.tag != ri.second)
    throw GluingMismatch(std::string(ri.name) + " needs case " + std::string(to_string(ri.second)) + " second, got " +
                         std::string(to_string(second.tag)));
  const SolveRequest& ra = first.request;
  const SolveRequest& rb = second.request;
  if (!(ra.p == rb.p) || ra.relation.lambda != rb.relation.lambda || ra.relation.form != rb.relation.form)
    throw GluingMismatch("both families need the same m and lambda");
  if (!(ra.relation.mu > 0) || rb.relation.mu != -ra.relation.mu) throw GluingMismatch("mu* = -mu with mu > 0 violated");
  if (std::abs(rb.c1 + ra.c1) > 1e-12 * std::max(1.0, std::abs(ra.c1)))
    throw GluingMismatch("c1* = -c1 violated (c1 = " + fmt(ra.c1) + ", c1* = " + fmt(rb.c1) + ")");
  if (recipe == Recipe::Torus4iii && !(ra.c1 > 1.0)) throw GluingMismatch("c1 > 1 violated (c1 = " + fmt(ra.c1) + ")");
  const int sa = first.sign(), sb = second.sign();
  if (ri.cross ? sb != -sa : sb != sa)
    throw GluingMismatch(std::string(ri.name) + (ri.cross ? " pairs opposite signs" : " pairs equal signs"));

  const double cap = first.domain.upper;
  if (std::abs(second.domain.lower - cap) > 1e-10 * std::max(1.0, cap))
    throw GluingMismatch("cap radii differ: " + fmt(cap) + " vs " + fmt(second.domain.lower));

  const Integral da = displacement(first, cap);
  const Integral db = displacement(second, second.domain.lower);
  const double expected = rb.offset + sb * db.value - sa * da.value;
  const double tol = std::max(1e-9, 10.0 * (da.error + db.error));
  if (std::abs(ra.offset - expected) > tol)
    throw GluingMismatch("offset of the first family must equal c* " + std::string(sb > 0 ? "+" : "-") + " d_second " +
                         std::string(sa > 0 ? "-" : "+") + " d_first = " + fmt(expected) + " (got " + fmt(ra.offset) + ")");

  AssembledSurface s;
  s.recipe = recipe;
  s.d_values = {{"d_first", std::abs(da.value), da.error}, {"d_second", std::abs(db.value), db.error}};
  const ProfileBranch b2 = mirror(second, rb.offset);
  if (ri.periodic) {
    const ProfileBranch a2 = mirror(first, ra.offset);
    s.branches = {a2, first, second, b2};
    s.reversed = {true, false, false, true};
  } else {
    // the mirrored first branch meets the mirrored second branch
    const double c2 = rb.offset - (second.u_lower - rb.offset) + (first.u_upper - ra.offset);
    const ProfileBranch a2 = mirror(first, c2);
    s.branches = {a2, b2, second, first};
    s.reversed = {false, false, true, true};
  }
  auto side = [&](std::size_t i, bool at_end, double shift) {
    // at_end: the traversal end of branch i
    const bool upper = s.reversed[i] ? !at_end : at_end;
    return Side{&s.branches[i], upper, shift};
  };
  int flag = 1;
  s.orientation = {1};
  for (std::size_t i = 0; i + 1 < s.branches.size(); ++i) {
    Junction j = evaluate_junction(side(i, true, 0.0), side(i + 1, false, 0.0), i, i + 1, flag);
    check_values(j);
    flag = j.right_flag;
    s.orientation.push_back(flag);
    s.junctions.push_back(j);
  }
  if (ri.periodic) {
    const std::size_t last = s.branches.size() - 1;
    const double period = side(last, true, 0.0).u() - side(0, false, 0.0).u();
    s.closure = evaluate_junction(side(last, true, 0.0), side(0, false, period), last, 0, flag);
    s.period = period;
    s.periodic_candidate = true;
    s.topology = Topology::OpenAnnulus;
    if (recipe == Recipe::Torus4iii) {
      if (std::abs(period) >= 1e-9) throw GluingMismatch("profile loop does not close (gap " + fmt(period) + ")");
      s.topology = Topology::Torus;
      s.period.reset();
    }
  } else {
    const EK far = first.domain.lower_kind;
    s.topology = end_topology(far);
    if (far == EK::AxisZero && std::abs(s.branches.front().u_lower - s.branches.back().u_lower) < 1e-9) {
      s.warnings.push_back("coincidence: both axis points meet (d_first = d_second); the surface is singular there");
    }
  }
  add_axis_points(s);
  return s;
}

AssembledSurface extend_periodic(const AssembledSurface& surface) {
  if (surface.topology == Topology::Torus || surface.topology == Topology::PeriodicTube) return surface;
  if (!surface.periodic_candidate || !surface.closure) throw NotPeriodic("profile ends are not matching candidates");
  const Junction& c = *surface.closure;
  if (c.slope_gap >= 1e-8) throw NotPeriodic("end slopes differ by " + fmt(c.slope_gap));
  if (c.smoothness != Smoothness::C2 && c.smoothness != Smoothness::C2WithCurvatureJump)
    throw NotPeriodic("end second derivatives differ");
  AssembledSurface out = surface;
  const double period = surface.period.value_or(0.0);
  if (std::abs(period) < 1e-9) {
    out.topology = Topology::Torus;
    out.may_be_torus = true;
    out.period.reset();
    out.warnings.push_back("coincidence: closure gap " + fmt(std::abs(period)) + " below 1e-9; may be a torus");
  } else {
    out.topology = Topology::PeriodicTube;
  }
  return out;
}

AssembledSurface assemble(Recipe recipe, const RecipeParams& prm) {
  if (recipe == Recipe::Cap) throw PreconditionError("use assemble_cap for the cap recipe");
  const RecipeInfo& ri = info(recipe);
  if (!(prm.mu > 0)) throw PreconditionError("recipe parameters need mu > 0");
  SolveRequest ra;
  ra.p = prm.p;
  ra.samples = prm.samples;
  ra.c1 = prm.c1;
  ra.sign = 1;
  SolveRequest rb = ra;
  if (recipe == Recipe::Torus4iii) {
    ra.relation = WeingartenRelation::k1_const(prm.mu);
    rb.relation = WeingartenRelation::k1_const(-prm.mu);
  } else {
    ra.relation = WeingartenRelation::inhomogeneous(prm.lambda, prm.mu);
    rb.relation = WeingartenRelation::inhomogeneous(prm.lambda, -prm.mu);
  }
  rb.c1 = -prm.c1;
  rb.offset = prm.base;
  rb.sign = ri.cross ? -1 : 1;
  ProfileBranch a = solve_case(ra, ri.first);
  const ProfileBranch b = solve_case(rb, ri.second);
  const double target = b.u_lower;
  shift_branch(a, target - a.u_upper);
  AssembledSurface s = glue(a, b, recipe);
  if (ri.periodic && s.topology != Topology::Torus) s = extend_periodic(s);
  return s;
}

AssembledSurface assemble_cap(const SolveRequest& req, std::size_t interval) {
  SolveRequest rp = req, rm = req;
  rp.sign = 1;
  rm.sign = -1;
  AssembledSurface s = glue_cap(solve(rp, interval), solve(rm, interval));
  if (s.periodic_candidate) s = extend_periodic(s);
  return s;
}

AssembledSurface assemble_branch(const ProfileBranch& br) {
  AssembledSurface s;
  s.recipe = Recipe::Cap;
  s.branches = {br};
  s.reversed = {false};
  s.orientation = {1};
  const DomainInterval& d = br.domain;
  if (d.lower_kind == EK::AxisZero)
    s.topology = Topology::Disk;
  else if (d.lower_kind == EK::DoubleRoot || d.upper_kind == EK::DoubleRoot)
    s.topology = Topology::Cylinder;
  else
    s.topology = Topology::OpenAnnulus;
  add_axis_points(s);
  return s;
}

std::vector<Eigen::Vector2d> profile_polyline(const AssembledSurface& s, int periods) {
  std::vector<Eigen::Vector2d> one;
  auto push = [&](double a, double u) {
    if (!std::isfinite(a) || !std::isfinite(u)) return;
    if (!one.empty() && std::abs(one.back()(0) - a) < 1e-14 && std::abs(one.back()(1) - u) < 1e-12) return;
    one.emplace_back(a, u);
  };
  for (std::size_t i = 0; i < s.branches.size(); ++i) {
    const ProfileBranch& br = s.branches[i];
    std::vector<Eigen::Vector2d> pts;
    if (br.domain.lower_kind == EK::AxisZero && std::isfinite(br.u_lower)) pts.emplace_back(0.0, br.u_lower);
    for (Eigen::Index k = 0; k < br.size(); ++k) pts.emplace_back(br.alpha(k), br.u(k));
    if (s.reversed[i]) std::reverse(pts.begin(), pts.end());
    for (const auto& q : pts) push(q(0), q(1));
  }
  if (!s.period || periods <= 1) return one;
  std::vector<Eigen::Vector2d> out = one;
  for (int k = 1; k < periods; ++k)
    for (std::size_t i = 0; i < one.size(); ++i) {
      const Eigen::Vector2d q(one[i](0), one[i](1) + k * *s.period);
      if (i == 0 && (out.back() - q).norm() < 1e-12) continue;
      out.push_back(q);
    }
  return out;
}

}  // namespace rlw
