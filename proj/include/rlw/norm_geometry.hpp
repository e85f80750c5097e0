#pragma once

#include <Eigen/Core>
#include <cassert>
#include <cmath>

#include "rlw/errors.hpp"

namespace rlw {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

// Exponent m of Phi(x) = (x1^2 + x2^2)^m + x3^(2m).
class NormParameter {
 public:
  NormParameter() = default;
  explicit NormParameter(int m) : m_(m) {
    if (m < 1) throw PreconditionError("norm exponent m must be >= 1");
  }

  int m() const { return m_; }
  int odd() const { return 2 * m_ - 1; }
  int even() const { return 2 * m_; }
  // (2m-1)/2m, the singular exponent of the profile integrals.
  double singular_exponent() const { return double(odd()) / double(even()); }

  friend bool operator==(const NormParameter&, const NormParameter&) = default;

 private:
  int m_ = 2;
};

template <typename Scalar>
Scalar phi(const NormParameter& p, const Vector3<Scalar>& x) {
  using std::pow;
  const Scalar r2 = x(0) * x(0) + x(1) * x(1);
  return pow(r2, p.m()) + pow(x(2) * x(2), p.m());
}

// sign(x)^p |x|^(p/q) for odd q.
template <typename Scalar>
Scalar signed_odd_root_pow(Scalar x, int p, int q) {
  using std::abs;
  using std::pow;
  if (q <= 0 || q % 2 == 0) throw PreconditionError("root index must be odd and positive");
  if (x == Scalar(0)) {
    if (p < 0) throw std::domain_error("zero base with negative exponent");
    return p == 0 ? Scalar(1) : Scalar(0);
  }
  const Scalar mag = pow(abs(x), Scalar(p) / Scalar(q));
  const bool negative = x < Scalar(0) && (p % 2 != 0);
  return negative ? -mag : mag;
}

enum class Chart { GraphOverAxis, GraphOverRadius };

// GraphOverAxis: value = alpha(u), radius = alpha.
// GraphOverRadius: value = beta(u) with u the radius.
template <typename Scalar>
struct ProfileJet {
  Chart chart = Chart::GraphOverAxis;
  Scalar value{};
  Scalar d1{};
  Scalar d2{};
  Scalar radius{};
};

template <typename Scalar>
struct BirkhoffFrame {
  Vector3<Scalar> eta;
  Scalar A{};
};

template <typename Scalar>
struct PrincipalCurvatures {
  Scalar k1{};
  Scalar k2{};
};

template <typename Scalar>
BirkhoffFrame<Scalar> birkhoff_normal(const NormParameter& p, Scalar d_alpha, Scalar d_beta, Scalar v) {
  using std::cos;
  using std::pow;
  using std::sin;
  if (d_alpha == Scalar(0) && d_beta == Scalar(0))
    throw PreconditionError("tangent (alpha', beta') must be nonzero");
  const int q = p.odd();
  const Scalar A = signed_odd_root_pow(d_alpha, p.even(), q) + signed_odd_root_pow(d_beta, p.even(), q);
  assert(A > Scalar(0));
  const Scalar s = pow(A, Scalar(-1) / Scalar(p.even()));
  const Scalar rb = signed_odd_root_pow(d_beta, 1, q);
  const Scalar ra = signed_odd_root_pow(d_alpha, 1, q);
  BirkhoffFrame<Scalar> frame;
  frame.A = A;
  frame.eta << -s * rb * cos(v), -s * rb * sin(v), s * ra;
  return frame;
}

template <typename Scalar>
PrincipalCurvatures<Scalar> principal_curvatures(const NormParameter& p, const ProfileJet<Scalar>& jet) {
  using std::pow;
  if (jet.d1 == Scalar(0)) throw PreconditionError("profile derivative must be nonzero");
  if (!(jet.radius > Scalar(0))) throw PreconditionError("radius must be positive");
  const int q = p.odd();
  const Scalar two_m = Scalar(p.even());
  const Scalar A = signed_odd_root_pow(jet.d1, p.even(), q) + Scalar(1);
  const Scalar w = signed_odd_root_pow(jet.d1, -(p.even() - 2), q);
  PrincipalCurvatures<Scalar> k;
  if (jet.chart == Chart::GraphOverAxis) {
    k.k1 = pow(A, -(two_m + 1) / two_m) * w * jet.d2 / Scalar(q);
    k.k2 = -pow(A, Scalar(-1) / two_m) / jet.radius;
  } else {
    k.k1 = -pow(A, -(two_m + 1) / two_m) * w * jet.d2 / Scalar(q);
    k.k2 = -pow(A, Scalar(-1) / two_m) * signed_odd_root_pow(jet.d1, 1, q) / jet.radius;
  }
  return k;
}

// Expresses GraphOverRadius curvatures in the orientation of the GraphOverAxis chart.
template <typename Scalar>
PrincipalCurvatures<Scalar> to_axis_orientation(const PrincipalCurvatures<Scalar>& k, const ProfileJet<Scalar>& jet) {
  if (jet.chart == Chart::GraphOverRadius && jet.d1 < Scalar(0)) return {-k.k1, -k.k2};
  return k;
}

template <typename Scalar>
Scalar weingarten_residual(const PrincipalCurvatures<Scalar>& k, Scalar lambda, Scalar mu) {
  return k.k1 + lambda * k.k2 - mu;
}

// Q = (|alpha'|^(2m/(2m-1)) + 1)^(-1/2m) written in terms of the radial slope u'(alpha) = 1/alpha'.
inline double q_from_radial_slope(const NormParameter& p, double du) {
  if (std::isinf(du)) return 1.0;
  const double a = std::pow(std::abs(du), double(p.even()) / double(p.odd()));
  return std::pow(a / (1.0 + a), 1.0 / p.even());
}

}  // namespace rlw
