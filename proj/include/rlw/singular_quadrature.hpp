#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rlw {

enum class EndpointKind { SimpleRoot, DoubleRoot, AxisZero, SmoothCap, Unbounded };

std::string to_string(EndpointKind kind);

struct DomainInterval {
  double lower = 0.0;
  double upper = 0.0;
  EndpointKind lower_kind = EndpointKind::SmoothCap;
  EndpointKind upper_kind = EndpointKind::SmoothCap;

  bool contains(double t) const { return t > lower && t < upper; }
  bool singular_lower() const;
  bool singular_upper() const;
};

struct Root {
  double location = 0.0;
  int multiplicity = 1;
  bool ill_conditioned = false;
};

// Roots of f on the open interval (lower, upper); upper may be +inf.
std::vector<Root> bracket_roots(const std::function<double(double)>& f, double lower, double upper, int probes = 64);

// numerator(t) / denominator(t)^exponent with denominator > 0 inside the domain.
struct SingularIntegrand {
  std::function<double(double)> numerator;
  std::function<double(double)> denominator;
  // denominator(root + offset) - denominator(root), evaluated without cancellation.
  std::function<double(double, double)> denominator_increment;
  double exponent = 0.75;
  // Power-law decay rate of the integrand as t -> inf, when known in closed form.
  std::optional<double> decay_exponent;

  double operator()(double t) const;
  double near(double root, double offset) const;
};

struct Endpoint {
  double location = 0.0;
  EndpointKind kind = EndpointKind::SmoothCap;
};

struct QuadratureResult {
  enum class Status { Finite, Divergent };
  Status status = Status::Finite;
  double value = 0.0;
  double error_estimate = 0.0;
  int divergence_sign = 0;

  bool finite() const { return status == Status::Finite; }
};

struct Integral {
  double value = 0.0;
  double error = 0.0;
};

// Globally adaptive Gauss-Kronrod (7/15) on a finite interval.
Integral gauss_kronrod(const std::function<double(double)>& f, double a, double b, double abs_tol, double rel_tol,
                       int max_intervals = 4000);

// Estimates q with integrand ~ t^(-q) as t -> inf (local log-slopes, Aitken accelerated).
double estimate_decay_exponent(const std::function<double(double)>& f, double start);

QuadratureResult integrate_singular(const SingularIntegrand& integrand, Endpoint from, Endpoint to,
                                    double tol = 1e-10);

struct ProfileSamples {
  Eigen::ArrayXd alpha;
  Eigen::ArrayXd u;
  Eigen::ArrayXd du;
  // Limits of u at the domain endpoints; +-inf when the integral diverges there.
  double u_lower = 0.0;
  double u_upper = 0.0;
  double error_estimate = 0.0;
};

struct Anchor {
  double alpha = 0.0;
  double u = 0.0;
};

ProfileSamples profile_from_integral(const SingularIntegrand& integrand, const DomainInterval& domain, int sign,
                                     Anchor anchor, int samples, double tol = 1e-10);

}  // namespace rlw
