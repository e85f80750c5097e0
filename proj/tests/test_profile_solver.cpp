#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "case_matrix.hpp"
#include "rlw/profile_solver.hpp"

using namespace rlw;
using doctest::Approx;
using WR = WeingartenRelation;

namespace {

double max_abs(const Eigen::ArrayXd& a) { return a.abs().maxCoeff(); }

}  // namespace

TEST_CASE("relation forms") {
  CHECK(WR::from_coefficients(0.5, 0.0).form == RelationForm::Homogeneous);
  CHECK(WR::from_coefficients(-1.0, 2.0).form == RelationForm::InhomLambdaMinus1);
  CHECK(WR::from_coefficients(2.0, 1.0).form == RelationForm::InhomGeneral);
  CHECK(WR::from_coefficients(0.0, 1.0).form == RelationForm::K1Const);
  CHECK(WR::k2_const(-1.0).residual({0.3, -1.0}) == 0.0);
}

TEST_CASE("case labels round trip") {
  for (CaseTag t : all_cases()) CHECK(case_from_string(to_string(t)) == t);
  CHECK(all_cases().size() == 33);
  CHECK(!case_from_string("7x").has_value());
}

TEST_CASE("classify examples") {
  auto c = classify(test::make_request(2, WR::homogeneous(0.5), 1.0));
  REQUIRE(c.intervals.size() == 1);
  CHECK(c.primary() == CaseTag::C5i_1);
  CHECK(c.intervals[0].domain.lower == 1.0);
  CHECK(std::isinf(c.intervals[0].domain.upper));
  CHECK(c.intervals[0].domain.lower_kind == EndpointKind::SimpleRoot);
  CHECK(c.intervals[0].domain.upper_kind == EndpointKind::Unbounded);

  c = classify(test::make_request(2, WR::homogeneous(1.0 / 3.0), 1.0));
  CHECK(c.primary() == CaseTag::C5i_2);

  c = classify(test::make_request(2, WR::inhomogeneous(1.0, -1.0), 0.2));
  CHECK(c.primary() == CaseTag::C63ii_2);
  CHECK(c.intervals[0].domain.lower == Approx(1 - std::sqrt(0.6)).epsilon(1e-12));
  CHECK(c.intervals[0].domain.upper == Approx(1 + std::sqrt(0.6)).epsilon(1e-12));
  CHECK(c.intervals[0].domain.lower_kind == EndpointKind::SimpleRoot);
  CHECK(c.intervals[0].domain.upper_kind == EndpointKind::SimpleRoot);

  CHECK_THROWS_AS(classify(test::make_request(2, WR::inhomogeneous(1.0, -1.0), 0.6)), NoSurface);
  CHECK_THROWS_AS(classify(test::make_request(2, WR::k2_const(1.0), 0.0)), NoSurface);
  CHECK_THROWS_AS(classify(test::make_request(2, WR::k1_zero(), 1.5)), NoSurface);
}

TEST_CASE("every case tag is reachable and intervals are disjoint") {
  for (int m : {2, 3})
    for (const auto& ci : test::case_matrix(m)) {
      CAPTURE(ci.label);
      const auto c = classify(ci.req);
      REQUIRE(ci.interval < c.intervals.size());
      CHECK(to_string(c.intervals[ci.interval].tag) == ci.label);
      for (std::size_t i = 1; i < c.intervals.size(); ++i)
        CHECK(c.intervals[i - 1].domain.upper <= c.intervals[i].domain.lower);
    }
}

TEST_CASE("classification covers the admissible set") {
  // admissible: 0 < G < 1 with G = c t^(-lambda) - t/(lambda+1) for lambda = -0.5, mu = 1
  for (double c1 : {1.0, 3.0}) {
    const auto req = test::make_request(2, WR::inhomogeneous(-0.5, 1.0), c1);
    const auto c = classify(req);
    int mismatches = 0;
    for (double t = 1e-4; t < 10.0; t += 1e-4) {
      const double g = c1 * std::pow(t, 0.5) - t / 0.5;
      const bool admissible = g > 0 && g < 1;
      bool inside = false;
      for (const auto& iv : c.intervals) inside = inside || iv.domain.contains(t);
      if (admissible != inside) ++mismatches;
    }
    CHECK(mismatches == 0);
  }
}

TEST_CASE("boundary inputs warn") {
  const auto c = classify(test::make_request(2, WR::inhomogeneous(-1.0, 1.0), 1.0 + 1e-7));
  CHECK(!c.warnings.empty());
  const auto coincide = classify(test::make_request(2, WR::inhomogeneous(-1.0, -1.0), 1.0));
  CHECK(coincide.intervals[0].domain.upper == Approx(1.0).epsilon(1e-12));
  CHECK(!coincide.warnings.empty());
}

TEST_CASE("constant k2 is the unit sphere") {
  auto b = solve_constant_k2(NormParameter(2), 0.0, 1);
  const double a = std::pow(2.0, -0.25);
  CHECK(b.du_at(a) == Approx(1.0).epsilon(1e-12));
  for (int sign : {1, -1}) {
    b = solve_constant_k2(NormParameter(2), 0.0, sign);
    CHECK(max_abs(b.alpha.pow(4) + b.u.pow(4) - 1.0) < 1e-10);
  }
  // the plus sign is the lower hemisphere: u(2^(-1/4)) = -2^(-1/4)
  b = solve_constant_k2(NormParameter(2), 0.0, 1);
  Eigen::Index near = 0;
  (b.alpha - a).abs().minCoeff(&near);
  CHECK(std::abs(b.u(near) + std::pow(1.0 - std::pow(b.alpha(near), 4), 0.25)) < 1e-12);
  b = solve_constant_k2(NormParameter(3), 5.0, -1);
  CHECK(b.u(0) == Approx(6.0));
}

TEST_CASE("constant k1 arcs") {
  auto b = solve_constant_k1(NormParameter(2), 1.0, 2.0, 0.0, 1);
  CHECK(b.domain.lower == 1.0);
  CHECK(b.domain.upper == 2.0);
  CHECK(max_abs((2.0 - b.alpha).pow(4) + b.u.pow(4) - 1.0) < 1e-10);
  b = solve_constant_k1(NormParameter(2), -1.0, -2.0, 0.0, -1);
  CHECK(b.domain.lower == 2.0);
  CHECK(b.domain.upper == 3.0);
  CHECK(max_abs((b.alpha - 2.0).pow(4) + b.u.pow(4) - 1.0) < 1e-10);
  b = solve_constant_k1(NormParameter(2), 1.0, 0.5, 0.0, 1);
  CHECK(b.domain.lower == 0.0);
  CHECK(max_abs((0.5 - b.alpha).pow(4) + b.u.pow(4) - 1.0) < 1e-10);
}

TEST_CASE("homogeneous branches") {
  auto b = solve_homogeneous(NormParameter(2), 1.0, 1.0, 0.0, 1);
  CHECK(std::abs(b.u_upper - b.u_lower - 0.25 * std::tgamma(0.5) * std::tgamma(0.25) / std::tgamma(0.75)) < 1e-9);
  b = solve_homogeneous(NormParameter(2), -1.0, 1.0, 0.0, 1);
  CHECK(b.domain.lower == 0.0);
  CHECK(b.domain.upper == 1.0);
  CHECK(std::abs(b.du_at(1e-6)) < 1e-10);
  CHECK(std::isfinite(b.u_lower));
  CHECK(std::isfinite(b.u_upper));
  b = solve_homogeneous(NormParameter(2), 1.0 / 3.0, 1.0, 0.0, 1);
  CHECK(std::isinf(b.u_upper));
  CHECK(b.u_upper > 0);
}

TEST_CASE("lambda = -1 branches") {
  auto v = solve_inhom_lambda_minus1(NormParameter(2), 1.0, 0.5, 1);
  REQUIRE(v.size() == 1);
  CHECK(v[0].domain.upper == Approx(std::exp(0.5)).epsilon(1e-14));
  CHECK(std::abs(v[0].du_at(1e-7)) < 1e-6);
  CHECK(std::abs(v[0].du_at(std::exp(0.5) * (1 - 1e-9))) < 1e-6);

  v = solve_inhom_lambda_minus1(NormParameter(2), 1.0, 1.0, 1);
  REQUIRE(v.size() == 2);
  CHECK(v[0].domain.upper == 1.0);
  CHECK(v[1].domain.lower == 1.0);
  CHECK(v[1].domain.upper == Approx(std::exp(1.0)).epsilon(1e-14));
  CHECK(v[0].domain.upper_kind == EndpointKind::DoubleRoot);
  CHECK(std::isinf(v[0].u_upper));
  CHECK(std::isinf(v[1].u_lower));

  v = solve_inhom_lambda_minus1(NormParameter(2), -1.0, 1.0, 1);
  REQUIRE(v.size() == 1);
  CHECK(v[0].domain.lower == Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(v[0].domain.upper == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("general inhomogeneous closed forms") {
  auto v = solve_inhom_general(NormParameter(2), 2.0, -1.0, 0.0, 1);
  REQUIRE(v.size() == 1);
  const double c3 = v[0].request.offset;
  CHECK(max_abs(v[0].alpha.pow(4) + (v[0].u - c3).pow(4) - 81.0) < 1e-8);

  v = solve_inhom_general(NormParameter(2), 1.0, -1.0, 0.2, 1);
  REQUIRE(v.size() == 1);
  CHECK(std::isinf(v[0].du(0)));
  CHECK(std::isinf(v[0].du(v[0].size() - 1)));

  v = solve_inhom_general(NormParameter(2), -3.0, 1.0, 0.0, 1);
  REQUIRE(v.size() == 1);
  CHECK(max_abs(v[0].alpha.pow(4) + (v[0].u - v[0].request.offset).pow(4) - 16.0) < 1e-8);
}

TEST_CASE("sphere consistency under scaling") {
  for (double lambda : {2.0, -0.5, -3.0}) {
    const double mu = lambda > -1 ? -1.0 : 1.0;
    const auto g = solve_inhom_general(NormParameter(2), lambda, mu, 0.0, 1).front();
    const double R = std::abs(lambda + 1.0);
    const auto s = solve_constant_k2(NormParameter(2), 0.0, 1, -1.0 / R);
    REQUIRE(g.size() == s.size());
    CHECK(max_abs(g.alpha - s.alpha) < 1e-9);
    CHECK(max_abs(g.u - s.u) < 1e-9);
    CHECK(max_abs(g.alpha.pow(4) + g.u.pow(4) - std::pow(R, 4)) < 1e-12 * std::pow(R, 4));
  }
}

TEST_CASE("normalization by |mu| is a homothety") {
  const auto a = solve_inhom_general(NormParameter(2), 1.0, -1.0, 0.2, 1).front();
  const auto b = solve(test::make_request(2, WR::inhomogeneous(1.0, -2.0), 0.2 / 2.0));
  CHECK(b.domain.lower == Approx(a.domain.lower / 2).epsilon(1e-12));
  CHECK(b.domain.upper == Approx(a.domain.upper / 2).epsilon(1e-12));
  CHECK(classify(test::make_request(2, WR::inhomogeneous(1.0, -2.0), 0.1)).scale == 2.0);
}

namespace {

// Size of the largest term in the first integral at a sample.
double integral_scale(const SolveRequest& r, double t, double du) {
  const double Q = q_from_radial_slope(r.p, du);
  const double lambda = r.relation.lambda, mu = r.relation.mu;
  switch (r.relation.form) {
    case RelationForm::Homogeneous: return std::max(1.0, std::pow(t, lambda) * Q);
    case RelationForm::InhomLambdaMinus1: return std::max({1.0, Q / t, std::abs(mu * std::log(t))});
    default:
      return std::max({1.0, std::pow(t, lambda) * Q, std::abs(mu * std::pow(t, lambda + 1) / (lambda + 1))});
  }
}

}  // namespace

TEST_CASE("first integral is constant along branches") {
  for (int m : {2, 3})
    for (const auto& ci : test::case_matrix(m)) {
      const RelationForm f = ci.req.relation.form;
      if (f == RelationForm::K1Zero || f == RelationForm::K1Const || f == RelationForm::K2Const) continue;
      CAPTURE(ci.label);
      const auto b = solve(ci.req, ci.interval);
      const double c = first_integral_constant(b.request);
      double drift = 0.0;
      for (Eigen::Index i = 0; i < b.size(); ++i) {
        const double t = b.alpha(i);
        if (!b.domain.contains(t) || !std::isfinite(b.du(i))) continue;
        const double v = first_integral_value(b.request, t, b.du(i));
        drift = std::max(drift, std::abs(v - c) / integral_scale(b.request, t, b.du(i)));
      }
      CHECK(drift < 1e-8);
    }
}

TEST_CASE("solve_all returns one branch per interval") {
  const auto v = solve_all(test::make_request(2, WR::inhomogeneous(-0.5, 1.0), 3.0));
  REQUIRE(v.size() == 2);
  CHECK(v[0].tag == CaseTag::C63iii_3_1);
  CHECK(v[1].tag == CaseTag::C63iii_3_2);
  CHECK(v[0].size() == 512);
}
