#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "rlw/norm_geometry.hpp"

using namespace rlw;
using doctest::Approx;

TEST_CASE("phi on the unit sphere and off it") {
  const NormParameter p(2);
  CHECK(phi(p, Vector3<double>(1, 0, 0)) == 1.0);
  CHECK(phi(p, Vector3<double>(0, 0, 1)) == 1.0);
  CHECK(phi(p, Vector3<double>(1, 1, 1)) == 5.0);
  CHECK_THROWS_AS(NormParameter(0), PreconditionError);
}

TEST_CASE("signed odd roots") {
  CHECK(signed_odd_root_pow(-1.0, 1, 3) == Approx(-1.0));
  CHECK(signed_odd_root_pow(-1.0, 4, 3) == Approx(1.0));
  CHECK(signed_odd_root_pow(8.0, 2, 3) == Approx(4.0));
  CHECK(signed_odd_root_pow(-8.0, -2, 3) == Approx(0.25));
  CHECK(signed_odd_root_pow(0.0, 2, 5) == 0.0);
  CHECK_THROWS_AS(signed_odd_root_pow(2.0, 1, 4), PreconditionError);
}

TEST_CASE("birkhoff normal examples") {
  const NormParameter p2(2), p3(3);
  auto f = birkhoff_normal(p2, 1.0, 1.0, 0.0);
  CHECK(f.A == Approx(2.0));
  const double s = std::pow(2.0, -0.25);
  CHECK(f.eta(0) == Approx(-s));
  CHECK(f.eta(1) == Approx(0.0));
  CHECK(f.eta(2) == Approx(s));

  f = birkhoff_normal(p2, 1.0, 0.0, 0.0);
  CHECK(f.A == Approx(1.0));
  CHECK(f.eta(2) == Approx(1.0));
  CHECK(std::abs(f.eta(0)) < 1e-15);

  f = birkhoff_normal(p3, -1.0, 1.0, M_PI / 2);
  const double s3 = std::pow(2.0, -1.0 / 6.0);
  CHECK(f.A == Approx(2.0));
  CHECK(std::abs(f.eta(0)) < 1e-15);
  CHECK(f.eta(1) == Approx(-s3));
  CHECK(f.eta(2) == Approx(-s3));

  CHECK_THROWS_AS(birkhoff_normal(p2, 0.0, 0.0, 0.0), PreconditionError);
}

TEST_CASE("birkhoff normals lie on the unit sphere") {
  for (int m : {1, 2, 3, 4}) {
    const NormParameter p(m);
    for (double a : {-3.0, -0.7, 0.0, 0.2, 1.0, 5.0})
      for (double b : {-2.0, -0.1, 0.0, 0.4, 3.0}) {
        if (a == 0.0 && b == 0.0) continue;
        for (double v : {0.0, 0.9, 2.5, 4.0}) {
          const auto f = birkhoff_normal(p, a, b, v);
          CHECK(std::abs(phi(p, f.eta) - 1.0) < 1e-12);
        }
      }
  }
}

TEST_CASE("principal curvature examples") {
  const NormParameter p(2);
  ProfileJet<double> cyl{Chart::GraphOverAxis, 1.0, 1.0, 0.0, 1.0};
  auto k = principal_curvatures(p, cyl);
  CHECK(std::abs(k.k1) < 1e-15);
  CHECK(k.k2 == Approx(-std::pow(2.0, -0.25)).epsilon(1e-12));

  // point u = alpha on alpha^4 + u^4 = 1
  const double a = std::pow(2.0, -0.25);
  ProfileJet<double> axis{Chart::GraphOverAxis, a, -1.0, -6.0 * std::pow(2.0, 0.25), a};
  k = principal_curvatures(p, axis);
  CHECK(k.k1 == Approx(-1.0).epsilon(1e-12));
  CHECK(k.k2 == Approx(-1.0).epsilon(1e-12));

  ProfileJet<double> rad{Chart::GraphOverRadius, a, -1.0, -6.0 * std::pow(2.0, 0.25), a};
  const auto kr = to_axis_orientation(principal_curvatures(p, rad), rad);
  CHECK(std::abs(kr.k1 - k.k1) < 1e-9);
  CHECK(std::abs(kr.k2 - k.k2) < 1e-9);

  ProfileJet<double> flat{Chart::GraphOverAxis, 1.0, 0.0, 1.0, 1.0};
  CHECK_THROWS_AS(principal_curvatures(p, flat), PreconditionError);
}

TEST_CASE("weingarten residual arithmetic") {
  CHECK(weingarten_residual<double>({-1.0, -1.0}, 1.0, -2.0) == 0.0);
  CHECK(weingarten_residual<double>({0.0, -0.84}, 0.5, 0.0) == Approx(-0.42));
  CHECK(weingarten_residual<double>({1.0, 123.0}, 0.0, 1.0) == 0.0);
}

namespace {

// alpha(u) = (1 - u^(2m))^(1/2m) on the unit sphere profile, with exact derivatives.
ProfileJet<double> sphere_axis_jet(int m, double u) {
  const double n = 2.0 * m;
  const double g = 1.0 - std::pow(u, n);
  const double a = std::pow(g, 1.0 / n);
  const double a1 = -std::pow(u, n - 1) * std::pow(g, 1.0 / n - 1.0);
  const double a2 = -(n - 1) * std::pow(u, n - 2) * std::pow(g, 1.0 / n - 1.0) -
                    std::pow(u, 2 * n - 2) * (n - 1) * std::pow(g, 1.0 / n - 2.0);
  return {Chart::GraphOverAxis, a, a1, a2, a};
}

}  // namespace

TEST_CASE("sphere profile has k1 = k2 = -1 in both charts") {
  for (int m : {2, 3}) {
    const NormParameter p(m);
    for (double u : {-0.8, -0.3, 0.25, 0.6, 0.9}) {
      const auto jet = sphere_axis_jet(m, u);
      const auto k = principal_curvatures(p, jet);
      CHECK(k.k1 == Approx(-1.0).epsilon(1e-9));
      CHECK(k.k2 == Approx(-1.0).epsilon(1e-9));
      // same point as beta(radius) = u
      ProfileJet<double> rad{Chart::GraphOverRadius, u, 1.0 / jet.d1, -jet.d2 / std::pow(jet.d1, 3), jet.radius};
      const auto kr = to_axis_orientation(principal_curvatures(p, rad), rad);
      CHECK(std::abs(kr.k1 - k.k1) < 1e-9);
      CHECK(std::abs(kr.k2 - k.k2) < 1e-9);
    }
  }
}

TEST_CASE("m = 1 reproduces euclidean surface of revolution curvatures") {
  const NormParameter p(1);
  for (double d1 : {-2.0, -0.5, 0.3, 1.0, 4.0})
    for (double d2 : {-1.5, 0.0, 0.7})
      for (double r : {0.5, 1.0, 3.0}) {
        const auto k = principal_curvatures(p, ProfileJet<double>{Chart::GraphOverAxis, r, d1, d2, r});
        const double w = std::sqrt(1.0 + d1 * d1);
        CHECK(std::abs(k.k1 - d2 / (w * w * w)) < 1e-12);
        CHECK(std::abs(k.k2 + 1.0 / (r * w)) < 1e-12);
      }
}

TEST_CASE("scaling a profile scales curvatures inversely") {
  const NormParameter p(3);
  const double s = 2.5;
  for (double u : {-0.5, 0.2, 0.7}) {
    const auto j = sphere_axis_jet(3, u);
    const auto k = principal_curvatures(p, j);
    // s alpha(u / s): value s a, slope a', second a'' / s
    const auto ks = principal_curvatures(p, ProfileJet<double>{Chart::GraphOverAxis, s * j.value, j.d1, j.d2 / s, s * j.radius});
    CHECK(ks.k1 == Approx(k.k1 / s).epsilon(1e-12));
    CHECK(ks.k2 == Approx(k.k2 / s).epsilon(1e-12));
  }
}

TEST_CASE("q from radial slope") {
  const NormParameter p(2);
  CHECK(q_from_radial_slope(p, INFINITY) == 1.0);
  CHECK(q_from_radial_slope(p, 0.0) == 0.0);
  // |alpha'| = 1 gives Q = 2^(-1/4)
  CHECK(q_from_radial_slope(p, 1.0) == Approx(std::pow(2.0, -0.25)));
  CHECK(q_from_radial_slope(p, -1.0) == Approx(std::pow(2.0, -0.25)));
}
