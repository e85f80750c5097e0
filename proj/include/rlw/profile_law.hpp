#pragma once

#include "rlw/norm_geometry.hpp"
#include "rlw/singular_quadrature.hpp"

namespace rlw {

// First integral Q(alpha) = G(alpha), where Q = (|alpha'|^(2m/(2m-1)) + 1)^(-1/2m).
//   Linear: G = a + b t
//   Power:  G = a t^(-lambda) + b t
//   Log:    G = t (a - mu log t)
// The radial slope is u' = +-G^(2m-1) / (1 - G^(2m))^((2m-1)/2m).
struct ProfileLaw {
  enum class Kind { Linear, Power, Log };

  NormParameter p;
  Kind kind = Kind::Linear;
  double a = 0.0;
  double b = 0.0;
  double lambda = 0.0;
  double mu = 0.0;

  static ProfileLaw linear(NormParameter p, double a, double b);
  static ProfileLaw power(NormParameter p, double a, double lambda, double b);
  static ProfileLaw log(NormParameter p, double a, double mu);

  double G(double t) const;
  double dG(double t) const;
  // G(t0 + d) - G(t0) without cancellation.
  double increment(double t0, double d) const;
  // 1 - G^(2m) at t0 + d minus its value at t0.
  double gap_increment(double t0, double d) const;

  double slope(double t) const;
  double slope_near(double root, double d) const;
  double second(double t) const;

  SingularIntegrand integrand() const;
};

}  // namespace rlw
