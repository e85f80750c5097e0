#include "rlw/profile_law.hpp"

#include <cmath>

namespace rlw {

ProfileLaw ProfileLaw::linear(NormParameter p, double a, double b) {
  ProfileLaw law;
  law.p = p;
  law.kind = Kind::Linear;
  law.a = a;
  law.b = b;
  return law;
}

ProfileLaw ProfileLaw::power(NormParameter p, double a, double lambda, double b) {
  ProfileLaw law;
  law.p = p;
  law.kind = Kind::Power;
  law.a = a;
  law.lambda = lambda;
  law.b = b;
  return law;
}

ProfileLaw ProfileLaw::log(NormParameter p, double a, double mu) {
  ProfileLaw law;
  law.p = p;
  law.kind = Kind::Log;
  law.a = a;
  law.mu = mu;
  return law;
}

double ProfileLaw::G(double t) const {
  switch (kind) {
    case Kind::Linear: return a + b * t;
    case Kind::Power: return a * std::pow(t, -lambda) + b * t;
    case Kind::Log: return t * (a - mu * std::log(t));
  }
  return 0.0;
}

double ProfileLaw::dG(double t) const {
  switch (kind) {
    case Kind::Linear: return b;
    case Kind::Power: return -lambda * a * std::pow(t, -lambda - 1.0) + b;
    case Kind::Log: return a - mu * std::log(t) - mu;
  }
  return 0.0;
}

namespace {

// (1+x)^(-lambda) - 1 + lambda x
double binomial_remainder(double x, double lambda) {
  if (std::abs(x) >= 0.1) return std::expm1(-lambda * std::log1p(x)) + lambda * x;
  double term = -lambda * x, sum = 0.0;
  for (int n = 2; n < 200; ++n) {
    term *= (-lambda - n + 1) / n * x;
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// (1+x) log(1+x) - x
double entropy_remainder(double x) {
  if (std::abs(x) >= 0.1) return (1.0 + x) * std::log1p(x) - x;
  double p = x * x, sum = 0.0;
  for (int n = 2; n < 200; ++n) {
    const double term = (n % 2 == 0 ? 1.0 : -1.0) * p / (n * (n - 1.0));
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    p *= x;
  }
  return sum;
}

}  // namespace

double ProfileLaw::increment(double t0, double d) const {
  const double x = d / t0;
  switch (kind) {
    case Kind::Linear: return b * d;
    case Kind::Power: return a * std::pow(t0, -lambda) * binomial_remainder(x, lambda) + d * dG(t0);
    case Kind::Log: return t0 * (x * dG(t0) - mu * entropy_remainder(x));
  }
  return 0.0;
}

double ProfileLaw::gap_increment(double t0, double d) const {
  const double g0 = G(t0);
  return -std::pow(g0, p.even()) * std::expm1(p.even() * std::log1p(increment(t0, d) / g0));
}

double ProfileLaw::slope(double t) const {
  const double g = G(t);
  return std::pow(g, p.odd()) / std::pow(1.0 - std::pow(g, p.even()), p.singular_exponent());
}

double ProfileLaw::slope_near(double root, double d) const {
  const double g = G(root + d);
  return std::pow(g, p.odd()) / std::pow(gap_increment(root, d), p.singular_exponent());
}

double ProfileLaw::second(double t) const {
  const double g = G(t);
  const double gap = 1.0 - std::pow(g, p.even());
  return p.odd() * dG(t) * std::pow(g, p.odd() - 1) * std::pow(gap, -double(2 * p.even() - 1) / p.even());
}

SingularIntegrand ProfileLaw::integrand() const {
  SingularIntegrand f;
  const ProfileLaw law = *this;
  f.numerator = [law](double t) { return std::pow(law.G(t), law.p.odd()); };
  f.denominator = [law](double t) { return 1.0 - std::pow(law.G(t), law.p.even()); };
  f.denominator_increment = [law](double t0, double d) { return law.gap_increment(t0, d); };
  f.exponent = p.singular_exponent();
  return f;
}

}  // namespace rlw
