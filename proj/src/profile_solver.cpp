#include "rlw/profile_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <utility>

#include "rlw/errors.hpp"

namespace rlw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBoundaryTol = 1e-12;
constexpr double kWarnBand = 1e-6;

using EK = EndpointKind;

struct TagName {
  CaseTag tag;
  const char* name;
};

constexpr std::array<TagName, 33> kTagNames = {{
    {CaseTag::C4i, "4i"},
    {CaseTag::C4ii, "4ii"},
    {CaseTag::C4iii_1, "4iii-1"},
    {CaseTag::C4iii_2, "4iii-2"},
    {CaseTag::C5i_1, "5i-1"},
    {CaseTag::C5i_2, "5i-2"},
    {CaseTag::C5ii, "5ii"},
    {CaseTag::C61i_1, "6.1i-1"},
    {CaseTag::C61i_2_1, "6.1i-2-1"},
    {CaseTag::C61i_2_2, "6.1i-2-2"},
    {CaseTag::C61i_3_1, "6.1i-3-1"},
    {CaseTag::C61i_3_2, "6.1i-3-2"},
    {CaseTag::C61ii, "6.1ii"},
    {CaseTag::C63i, "6.3i"},
    {CaseTag::C63ii_1, "6.3ii-1"},
    {CaseTag::C63ii_2, "6.3ii-2"},
    {CaseTag::C63ii_3, "6.3ii-3"},
    {CaseTag::C63iii_1, "6.3iii-1"},
    {CaseTag::C63iii_2_1, "6.3iii-2-1"},
    {CaseTag::C63iii_2_2, "6.3iii-2-2"},
    {CaseTag::C63iii_3_1, "6.3iii-3-1"},
    {CaseTag::C63iii_3_2, "6.3iii-3-2"},
    {CaseTag::C63iv_1, "6.3iv-1"},
    {CaseTag::C63iv_2, "6.3iv-2"},
    {CaseTag::C63iv_3, "6.3iv-3"},
    {CaseTag::C63v_1, "6.3v-1"},
    {CaseTag::C63v_2, "6.3v-2"},
    {CaseTag::C63v_3_1, "6.3v-3-1"},
    {CaseTag::C63v_3_2_1, "6.3v-3-2-1"},
    {CaseTag::C63v_3_2_2, "6.3v-3-2-2"},
    {CaseTag::C63v_3_3_1, "6.3v-3-3-1"},
    {CaseTag::C63v_3_3_2, "6.3v-3-3-2"},
    {CaseTag::C63vi, "6.3vi"},
}};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

// Relative closeness of x to a boundary value b.
double rel_distance(double x, double b) { return std::abs(x - b) / std::max(std::abs(b), 1e-300); }

struct Builder {
  Classification out;
  double s = 1.0;  // length scale |mu|

  void add(CaseTag tag, double lo, EK lk, double hi, EK hk, AnchorSide anchor) {
    CaseInterval ci;
    ci.tag = tag;
    ci.domain.lower = lo / s;
    ci.domain.upper = std::isinf(hi) ? kInf : hi / s;
    ci.domain.lower_kind = lk;
    ci.domain.upper_kind = hk;
    ci.anchor = anchor;
    out.intervals.push_back(ci);
  }
  void near_boundary(double x, double b, const std::string& what) {
    const double d = rel_distance(x, b);
    if (d > kBoundaryTol && d <= kWarnBand)
      out.warnings.push_back("ill-conditioned: constant within relative " + fmt(d) + " of the boundary " + what);
  }
};

// The unique simple root of f in (lo, hi); f(lo) and f(hi) must differ in sign.
double unique_root(const std::function<double(double)>& f, double lo, double hi) {
  auto roots = bracket_roots(f, lo, hi, 64);
  std::vector<double> simple;
  for (const Root& r : roots)
    if (r.multiplicity == 1) simple.push_back(r.location);
  if (simple.size() == 1) return simple.front();
  double a = lo, b = hi;
  double fa = f(a);
  if (!std::isfinite(fa)) {
    a = lo + (hi - lo) * 1e-300;
    fa = f(a);
  }
  const double fb = f(b);
  if (!((fa > 0) != (fb > 0))) throw Error("root of the boundary function is not bracketed");
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (fa > 0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return std::abs(f(a)) < std::abs(f(b)) ? a : b;
}

// Expands hi until f changes sign relative to f(lo_probe).
double expand_until_sign_change(const std::function<double(double)>& f, double lo_probe, double hi) {
  const bool pos = f(lo_probe) > 0;
  for (int it = 0; it < 200; ++it) {
    if ((f(hi) > 0) != pos) return hi;
    hi *= 2.0;
  }
  throw Error("failed to bracket domain endpoint");
}

void classify_k1_zero(const SolveRequest& req, Builder& bld) {
  if (!(req.c1 > 0.0 && req.c1 < 1.0))
    throw NoSurface("no admissible profile: the cone constant must satisfy 0 < c < 1");
  bld.out.law = ProfileLaw::linear(req.p, req.c1, 0.0);
  bld.add(CaseTag::C4i, 0.0, EK::AxisZero, kInf, EK::Unbounded, AnchorSide::ClosedForm);
}

void classify_k2_const(const SolveRequest& req, Builder& bld) {
  const double mu = req.relation.mu;
  if (!(mu < 0.0)) throw NoSurface("no admissible profile: constant k2 = mu requires mu < 0");
  bld.s = -mu;
  bld.out.scale = -mu;
  bld.out.law = ProfileLaw::linear(req.p, 0.0, -mu);
  bld.add(CaseTag::C4ii, 0.0, EK::AxisZero, 1.0, EK::SimpleRoot, AnchorSide::ClosedForm);
}

void classify_k1_const(const SolveRequest& req, Builder& bld) {
  const double mu = req.relation.mu;
  if (mu == 0.0) throw PreconditionError("constant k1 relation needs mu != 0");
  const double c = req.c1;
  bld.s = std::abs(mu);
  bld.out.scale = std::abs(mu);
  bld.out.law = ProfileLaw::linear(req.p, c, -mu);
  if (mu > 0) {
    if (!(c > 0.0)) throw NoSurface("no admissible profile: c1 - mu*alpha > 0 requires c1 > 0");
    if (c >= 1.0)
      bld.add(CaseTag::C4iii_1, c - 1.0, EK::SimpleRoot, c, EK::SmoothCap, AnchorSide::ClosedForm);
    else
      bld.add(CaseTag::C4iii_1, 0.0, EK::AxisZero, c, EK::SmoothCap, AnchorSide::ClosedForm);
  } else {
    if (!(c < 1.0)) throw NoSurface("no admissible profile: c1 - mu*alpha < 1 requires c1 < 1");
    if (c < 0.0)
      bld.add(CaseTag::C4iii_2, -c, EK::SmoothCap, 1.0 - c, EK::SimpleRoot, AnchorSide::ClosedForm);
    else
      bld.add(CaseTag::C4iii_2, 0.0, EK::AxisZero, 1.0 - c, EK::SimpleRoot, AnchorSide::ClosedForm);
  }
}

void classify_homogeneous(const SolveRequest& req, Builder& bld) {
  const double lambda = req.relation.lambda;
  const double c2 = req.c1;
  if (lambda == 0.0) throw PreconditionError("homogeneous relation needs lambda != 0");
  if (!(c2 > 0.0)) throw PreconditionError("homogeneous relation needs c2 > 0");
  bld.out.law = ProfileLaw::power(req.p, std::pow(c2, lambda), lambda, 0.0);
  if (lambda > 0) {
    const double q = req.p.odd() * lambda;
    const bool boundary = std::abs(q - 1.0) <= kBoundaryTol;
    bld.near_boundary(q, 1.0, "(2m-1)lambda = 1");
    const CaseTag tag = (q > 1.0 && !boundary) ? CaseTag::C5i_1 : CaseTag::C5i_2;
    bld.add(tag, c2, EK::SimpleRoot, kInf, EK::Unbounded, AnchorSide::Lower);
  } else {
    bld.add(CaseTag::C5ii, 0.0, EK::AxisZero, c2, EK::SimpleRoot, AnchorSide::Upper);
  }
}

void classify_lambda_minus1(const SolveRequest& req, Builder& bld) {
  const double mu = req.relation.mu;
  if (mu == 0.0) throw PreconditionError("inhomogeneous relation needs mu != 0");
  const double s = std::abs(mu);
  const double ms = mu > 0 ? 1.0 : -1.0;
  bld.s = s;
  bld.out.scale = s;
  double c = (req.c1 + mu * std::log(s)) / s;
  double c1 = req.c1;
  if (ms > 0) {
    bld.near_boundary(c, 1.0, "c1 = 1");
    if (rel_distance(c, 1.0) <= kBoundaryTol) {
      c = 1.0;
      c1 = s * c - mu * std::log(s);
    }
  }
  bld.out.law = ProfileLaw::log(req.p, c1, mu);
  auto g = [c, ms](double t) { return t * (c - ms * std::log(t)); };
  auto f = [g](double t) { return 1.0 - g(t); };
  if (ms > 0) {
    const double cap = std::exp(c);
    if (c == 1.0) {
      bld.add(CaseTag::C61i_2_1, 0.0, EK::AxisZero, 1.0, EK::DoubleRoot, AnchorSide::Lower);
      bld.add(CaseTag::C61i_2_2, 1.0, EK::DoubleRoot, cap, EK::SmoothCap, AnchorSide::Upper);
    } else if (c < 1.0) {
      bld.add(CaseTag::C61i_1, 0.0, EK::AxisZero, cap, EK::SmoothCap, AnchorSide::Upper);
    } else {
      const double peak = std::exp(c - 1.0);
      const double a1 = unique_root(f, 0.0, peak);
      const double a2 = unique_root(f, peak, cap);
      bld.add(CaseTag::C61i_3_1, 0.0, EK::AxisZero, a1, EK::SimpleRoot, AnchorSide::Upper);
      bld.add(CaseTag::C61i_3_2, a2, EK::SimpleRoot, cap, EK::SmoothCap, AnchorSide::Lower);
    }
  } else {
    const double start = std::exp(-c);
    const double a3 = unique_root(f, start, start + 1.0);
    if (rel_distance(a3, 1.0) <= kBoundaryTol && rel_distance(c, 1.0) <= kBoundaryTol)
      bld.out.warnings.push_back("coincidence: the root alpha3 = 1 sits at c1* = 1 (unresolved)");
    bld.add(CaseTag::C61ii, start, EK::SmoothCap, a3, EK::SimpleRoot, AnchorSide::Upper);
  }
}

void classify_general(const SolveRequest& req, Builder& bld) {
  const double lambda = req.relation.lambda;
  const double mu = req.relation.mu;
  if (mu == 0.0) throw PreconditionError("inhomogeneous relation needs mu != 0");
  if (lambda == 0.0 || lambda == -1.0) throw PreconditionError("general inhomogeneous relation needs lambda not in {0,-1}");
  const double s = std::abs(mu);
  const double ms = mu > 0 ? 1.0 : -1.0;
  const double L = lambda + 1.0;
  bld.s = s;
  bld.out.scale = s;
  double c = req.c1 * std::pow(s, lambda);
  auto unscale = [&](double cn) { return cn * std::pow(s, -lambda); };
  auto set_law = [&](double cn) { bld.out.law = ProfileLaw::power(req.p, unscale(cn), lambda, -mu / L); };
  auto sphere = [&](CaseTag tag, double radius) {
    bld.out.law = ProfileLaw::linear(req.p, 0.0, -mu / L);
    bld.add(tag, 0.0, EK::AxisZero, radius, EK::SimpleRoot, AnchorSide::ClosedForm);
  };
  const bool zero = std::abs(c) <= kBoundaryTol;
  auto G = [&](double t) { return c * std::pow(t, -lambda) - ms * t / L; };
  std::function<double(double)> factor;
  if (lambda > 0)
    factor = [L, lambda](double t) { return L * std::pow(t, lambda); };
  else if (lambda > -1)
    factor = [L](double) { return L; };
  else
    factor = [L](double) { return -L; };
  auto f = [&](double t) { return factor(t) * (1.0 - G(t)); };

  if (lambda > 0 && ms > 0) {
    if (!(c > 0.0) || zero) throw NoSurface("no admissible profile: case lambda > 0, mu > 0 requires c1 > 0");
    set_law(c);
    const double a4 = std::pow(c * L, 1.0 / L);
    const double a5 = unique_root(f, 0.0, a4);
    bld.add(CaseTag::C63i, a5, EK::SimpleRoot, a4, EK::SmoothCap, AnchorSide::Lower);
  } else if (lambda > 0) {
    if (zero) {
      sphere(CaseTag::C63ii_1, L);
    } else if (c > 0) {
      const double bound = std::pow(lambda, lambda) / L;
      bld.near_boundary(c, bound, "c1* = lambda^lambda/(lambda+1)");
      if (c >= bound * (1.0 - kBoundaryTol))
        throw NoSurface("no admissible profile: c1* >= lambda^lambda/(lambda+1) violates c1* < lambda^lambda/(lambda+1) (bound " +
                        fmt(bound) + ")");
      set_law(c);
      const double a6 = unique_root(f, 0.0, lambda);
      const double a7 = unique_root(f, lambda, L);
      bld.add(CaseTag::C63ii_2, a6, EK::SimpleRoot, a7, EK::SimpleRoot, AnchorSide::Lower);
    } else {
      set_law(c);
      const double a8 = std::pow(-c * L, 1.0 / L);
      const double hi = expand_until_sign_change(f, a8, 2.0 * std::max(a8, L));
      const double a9 = unique_root(f, a8, hi);
      bld.add(CaseTag::C63ii_3, a8, EK::SmoothCap, a9, EK::SimpleRoot, AnchorSide::Upper);
    }
  } else if (lambda > -1 && ms > 0) {
    if (!(c > 0.0) || zero) throw NoSurface("no admissible profile: case -1 < lambda < 0, mu > 0 requires c1 > 0");
    const double bound = 1.0 / (L * std::pow(-lambda, -lambda));
    bld.near_boundary(c, bound, "c1 = 1/((lambda+1)(-lambda)^(-lambda))");
    if (rel_distance(c, bound) <= kBoundaryTol) c = bound;
    set_law(c);
    const double a10 = std::pow(c * L, 1.0 / L);
    const double a11 = std::pow(c * (-lambda) * L, 1.0 / L);
    if (c == bound) {
      bld.add(CaseTag::C63iii_2_1, 0.0, EK::AxisZero, a11, EK::DoubleRoot, AnchorSide::Lower);
      bld.add(CaseTag::C63iii_2_2, a11, EK::DoubleRoot, a10, EK::SmoothCap, AnchorSide::Upper);
    } else if (c < bound) {
      bld.add(CaseTag::C63iii_1, 0.0, EK::AxisZero, a10, EK::SmoothCap, AnchorSide::Lower);
    } else {
      const double a12 = unique_root(f, 0.0, a11);
      const double a13 = unique_root(f, a11, a10);
      bld.add(CaseTag::C63iii_3_1, 0.0, EK::AxisZero, a12, EK::SimpleRoot, AnchorSide::Upper);
      bld.add(CaseTag::C63iii_3_2, a13, EK::SimpleRoot, a10, EK::SmoothCap, AnchorSide::Lower);
    }
  } else if (lambda > -1) {
    if (zero) {
      sphere(CaseTag::C63iv_1, L);
    } else if (c > 0) {
      set_law(c);
      const double a14 = unique_root(f, 0.0, L);
      bld.add(CaseTag::C63iv_2, 0.0, EK::AxisZero, a14, EK::SimpleRoot, AnchorSide::Upper);
    } else {
      set_law(c);
      const double a15 = std::pow(-c * L, 1.0 / L);
      const double hi = expand_until_sign_change(f, a15, 2.0 * std::max(a15, L));
      const double a16 = unique_root(f, a15, hi);
      bld.add(CaseTag::C63iv_3, a15, EK::SmoothCap, a16, EK::SimpleRoot, AnchorSide::Upper);
    }
  } else if (ms > 0) {
    const double w = -L;
    if (zero) {
      sphere(CaseTag::C63v_1, w);
    } else if (c > 0) {
      set_law(c);
      const double a17 = unique_root(f, 0.0, w);
      bld.add(CaseTag::C63v_2, 0.0, EK::AxisZero, a17, EK::SimpleRoot, AnchorSide::Upper);
    } else {
      const double bound = -1.0 / (w * std::pow(w + 1.0, w + 1.0));
      bld.near_boundary(c, bound, "c1 = -1/(omega(omega+1)^(omega+1))");
      if (rel_distance(c, bound) <= kBoundaryTol) c = bound;
      set_law(c);
      const double a18 = 1.0 / std::pow(-c * w, 1.0 / w);
      const double a19 = 1.0 / std::pow(-c * w * (w + 1.0), 1.0 / w);
      if (c == bound) {
        bld.add(CaseTag::C63v_3_2_1, 0.0, EK::AxisZero, a19, EK::DoubleRoot, AnchorSide::Lower);
        bld.add(CaseTag::C63v_3_2_2, a19, EK::DoubleRoot, a18, EK::SmoothCap, AnchorSide::Upper);
      } else if (c < bound) {
        bld.add(CaseTag::C63v_3_1, 0.0, EK::AxisZero, a18, EK::SmoothCap, AnchorSide::Lower);
      } else {
        const double a20 = unique_root(f, 0.0, a19);
        const double a21 = unique_root(f, a19, a18);
        bld.add(CaseTag::C63v_3_3_1, 0.0, EK::AxisZero, a20, EK::SimpleRoot, AnchorSide::Upper);
        bld.add(CaseTag::C63v_3_3_2, a21, EK::SimpleRoot, a18, EK::SmoothCap, AnchorSide::Lower);
      }
    }
  } else {
    const double w = -L;
    if (!(c > 0.0) || zero) throw NoSurface("no admissible profile: case lambda < -1, mu < 0 requires c1* > 0");
    set_law(c);
    const double a22 = 1.0 / std::pow(c * w, 1.0 / w);
    const double hi = expand_until_sign_change(f, a22, 2.0 * std::max(a22, w));
    const double a23 = unique_root(f, a22, hi);
    bld.add(CaseTag::C63vi, a22, EK::SmoothCap, a23, EK::SimpleRoot, AnchorSide::Upper);
  }
}

double closed_form_u(const ProfileLaw& law, const SolveRequest& req, double t) {
  if (law.b == 0.0) return req.offset + req.sign * law.slope(0.0) * t;
  const double g = law.G(t);
  const double gap = std::max(0.0, 1.0 - std::pow(g, law.p.even()));
  return req.offset - req.sign * std::pow(gap, 1.0 / law.p.even()) / law.b;
}

ProfileBranch build_branch(const SolveRequest& req, const Classification& cls, const CaseInterval& ci) {
  ProfileBranch br;
  br.request = req;
  br.tag = ci.tag;
  br.domain = ci.domain;
  br.law = cls.law;
  br.anchor = ci.anchor;
  SingularIntegrand f = cls.law.integrand();
  if (ci.domain.upper_kind == EK::Unbounded) {
    if (ci.tag == CaseTag::C4i)
      f.decay_exponent = 0.0;
    else
      f.decay_exponent = req.p.odd() * req.relation.lambda;
  }
  Anchor anchor;
  anchor.u = req.offset;
  switch (ci.anchor) {
    case AnchorSide::Lower: anchor.alpha = ci.domain.lower; break;
    case AnchorSide::Upper: anchor.alpha = ci.domain.upper; break;
    case AnchorSide::ClosedForm: anchor.alpha = std::isinf(ci.domain.upper) ? ci.domain.lower : ci.domain.upper; break;
  }
  if (ci.anchor == AnchorSide::ClosedForm) anchor.u = closed_form_u(cls.law, req, anchor.alpha);
  ProfileSamples smp = profile_from_integral(f, ci.domain, req.sign, anchor, req.samples);
  br.alpha = smp.alpha;
  br.u = smp.u;
  br.du = smp.du;
  br.u_lower = smp.u_lower;
  br.u_upper = smp.u_upper;
  br.error_estimate = smp.error_estimate;
  if (ci.anchor == AnchorSide::ClosedForm) {
    for (Eigen::Index i = 0; i < br.u.size(); ++i) br.u(i) = closed_form_u(cls.law, req, br.alpha(i));
    br.u_lower = closed_form_u(cls.law, req, ci.domain.lower);
    if (!std::isinf(ci.domain.upper)) br.u_upper = closed_form_u(cls.law, req, ci.domain.upper);
    br.error_estimate = 0.0;
  }
  return br;
}

}  // namespace

std::string to_string(RelationForm form) {
  switch (form) {
    case RelationForm::K1Zero: return "K1Zero";
    case RelationForm::K2Const: return "K2Const";
    case RelationForm::K1Const: return "K1Const";
    case RelationForm::Homogeneous: return "Homogeneous";
    case RelationForm::InhomLambdaMinus1: return "InhomLambdaMinus1";
    case RelationForm::InhomGeneral: return "InhomGeneral";
  }
  return "?";
}

WeingartenRelation WeingartenRelation::k1_zero() { return {RelationForm::K1Zero, 0.0, 0.0}; }
WeingartenRelation WeingartenRelation::k2_const(double mu) { return {RelationForm::K2Const, 0.0, mu}; }
WeingartenRelation WeingartenRelation::k1_const(double mu) {
  if (mu == 0.0) throw PreconditionError("constant k1 relation needs mu != 0");
  return {RelationForm::K1Const, 0.0, mu};
}
WeingartenRelation WeingartenRelation::homogeneous(double lambda) {
  if (lambda == 0.0) throw PreconditionError("homogeneous relation needs lambda != 0");
  return {RelationForm::Homogeneous, lambda, 0.0};
}
WeingartenRelation WeingartenRelation::inhomogeneous(double lambda, double mu) {
  if (mu == 0.0) throw PreconditionError("inhomogeneous relation needs mu != 0");
  if (lambda == 0.0) return k1_const(mu);
  return {lambda == -1.0 ? RelationForm::InhomLambdaMinus1 : RelationForm::InhomGeneral, lambda, mu};
}
WeingartenRelation WeingartenRelation::from_coefficients(double lambda, double mu) {
  if (lambda == 0.0 && mu == 0.0) return k1_zero();
  if (mu == 0.0) return homogeneous(lambda);
  return inhomogeneous(lambda, mu);
}

double WeingartenRelation::residual(const PrincipalCurvatures<double>& k) const {
  if (form == RelationForm::K2Const) return k.k2 - mu;
  return weingarten_residual(k, lambda, mu);
}

std::string_view to_string(CaseTag tag) {
  for (const auto& e : kTagNames)
    if (e.tag == tag) return e.name;
  return "?";
}

std::optional<CaseTag> case_from_string(std::string_view label) {
  for (const auto& e : kTagNames)
    if (label == e.name) return e.tag;
  return std::nullopt;
}

const std::vector<CaseTag>& all_cases() {
  static const std::vector<CaseTag> tags = [] {
    std::vector<CaseTag> v;
    for (const auto& e : kTagNames) v.push_back(e.tag);
    return v;
  }();
  return tags;
}

Classification classify(const SolveRequest& req) {
  if (!std::isfinite(req.c1) || !std::isfinite(req.offset) || !std::isfinite(req.relation.lambda) ||
      !std::isfinite(req.relation.mu))
    throw PreconditionError("solve request constants must be finite");
  Builder bld;
  switch (req.relation.form) {
    case RelationForm::K1Zero: classify_k1_zero(req, bld); break;
    case RelationForm::K2Const: classify_k2_const(req, bld); break;
    case RelationForm::K1Const: classify_k1_const(req, bld); break;
    case RelationForm::Homogeneous: classify_homogeneous(req, bld); break;
    case RelationForm::InhomLambdaMinus1: classify_lambda_minus1(req, bld); break;
    case RelationForm::InhomGeneral: classify_general(req, bld); break;
  }
  return bld.out;
}

std::string ProfileBranch::id() const {
  std::ostringstream os;
  os << to_string(tag) << (sign() > 0 ? "+" : "-") << " m=" << request.p.m();
  return os.str();
}

namespace {

// 1 - G^(2m) at t, evaluated relative to the nearest root endpoint when close to one.
double gap_at(const ProfileBranch& br, double t) {
  const DomainInterval& d = br.domain;
  const bool lower_root = d.lower_kind == EK::SimpleRoot || d.lower_kind == EK::DoubleRoot;
  const bool upper_root = d.upper_kind == EK::SimpleRoot || d.upper_kind == EK::DoubleRoot;
  const double width = std::isinf(d.upper) ? std::max(1.0, d.lower) : d.upper - d.lower;
  if (lower_root && std::abs(t - d.lower) < 0.25 * width) return br.law.gap_increment(d.lower, t - d.lower);
  if (upper_root && std::abs(t - d.upper) < 0.25 * width) return br.law.gap_increment(d.upper, t - d.upper);
  return 1.0 - std::pow(br.law.G(t), br.law.p.even());
}

}  // namespace

double ProfileBranch::du_at(double t) const {
  const double g = law.G(t);
  return sign() * std::pow(g, law.p.odd()) / std::pow(gap_at(*this, t), law.p.singular_exponent());
}

double ProfileBranch::d2u_at(double t) const {
  const double g = law.G(t);
  const int m2 = law.p.even();
  return sign() * law.p.odd() * law.dG(t) * std::pow(g, law.p.odd() - 1) *
         std::pow(gap_at(*this, t), -double(2 * m2 - 1) / m2);
}

ProfileBranch solve(const SolveRequest& req, std::size_t interval) {
  Classification cls = classify(req);
  if (interval >= cls.intervals.size()) throw PreconditionError("interval index out of range");
  return build_branch(req, cls, cls.intervals[interval]);
}

std::vector<ProfileBranch> solve_all(const SolveRequest& req) {
  Classification cls = classify(req);
  std::vector<ProfileBranch> out;
  for (const CaseInterval& ci : cls.intervals) out.push_back(build_branch(req, cls, ci));
  return out;
}

ProfileBranch solve_constant_k2(NormParameter p, double c, int sign, double mu, int samples) {
  SolveRequest req;
  req.p = p;
  req.relation = WeingartenRelation::k2_const(mu);
  req.offset = c;
  req.sign = sign;
  req.samples = samples;
  return solve(req);
}

ProfileBranch solve_constant_k1(NormParameter p, double mu, double c1, double c2, int sign, int samples) {
  SolveRequest req;
  req.p = p;
  req.relation = WeingartenRelation::k1_const(mu);
  req.c1 = c1;
  req.offset = c2;
  req.sign = sign;
  req.samples = samples;
  return solve(req);
}

ProfileBranch solve_k1_zero(NormParameter p, double q, double c, int sign, int samples) {
  SolveRequest req;
  req.p = p;
  req.relation = WeingartenRelation::k1_zero();
  req.c1 = q;
  req.offset = c;
  req.sign = sign;
  req.samples = samples;
  return solve(req);
}

ProfileBranch solve_homogeneous(NormParameter p, double lambda, double c2, double c3, int sign, int samples) {
  SolveRequest req;
  req.p = p;
  req.relation = WeingartenRelation::homogeneous(lambda);
  req.c1 = c2;
  req.offset = c3;
  req.sign = sign;
  req.samples = samples;
  return solve(req);
}

std::vector<ProfileBranch> solve_inhom_lambda_minus1(NormParameter p, double mu, double c1, int sign, double offset,
                                                     int samples) {
  SolveRequest req;
  req.p = p;
  req.relation = WeingartenRelation::inhomogeneous(-1.0, mu);
  req.c1 = c1;
  req.offset = offset;
  req.sign = sign;
  req.samples = samples;
  return solve_all(req);
}

std::vector<ProfileBranch> solve_inhom_general(NormParameter p, double lambda, double mu, double c1, int sign,
                                               double offset, int samples) {
  if (lambda == -1.0) return solve_inhom_lambda_minus1(p, mu, c1, sign, offset, samples);
  SolveRequest req;
  req.p = p;
  req.relation = WeingartenRelation::inhomogeneous(lambda, mu);
  req.c1 = c1;
  req.offset = offset;
  req.sign = sign;
  req.samples = samples;
  return solve_all(req);
}

double first_integral_value(const SolveRequest& req, double alpha, double du) {
  const double Q = q_from_radial_slope(req.p, du);
  const WeingartenRelation& r = req.relation;
  switch (r.form) {
    case RelationForm::K1Zero: return Q;
    case RelationForm::K2Const: return Q + r.mu * alpha;
    case RelationForm::K1Const: return Q + r.mu * alpha;
    case RelationForm::Homogeneous: return std::pow(alpha, r.lambda) * Q;
    case RelationForm::InhomLambdaMinus1: return Q / alpha + r.mu * std::log(alpha);
    case RelationForm::InhomGeneral:
      return std::pow(alpha, r.lambda) * Q + r.mu * std::pow(alpha, r.lambda + 1.0) / (r.lambda + 1.0);
  }
  return 0.0;
}

double first_integral_constant(const SolveRequest& req) {
  switch (req.relation.form) {
    case RelationForm::K2Const: return 0.0;
    case RelationForm::Homogeneous: return std::pow(req.c1, req.relation.lambda);
    default: return req.c1;
  }
}

}  // namespace rlw
