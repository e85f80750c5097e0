#include "rlw/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rlw/errors.hpp"

namespace rlw {

std::string to_string(TruncationReason reason) {
  switch (reason) {
    case TruncationReason::None: return "None";
    case TruncationReason::AxisOfSymmetryOfProfile: return "AxisOfSymmetryOfProfile";
    case TruncationReason::RadiusVanished: return "RadiusVanished";
    case TruncationReason::SlopeBlowup: return "SlopeBlowup";
    case TruncationReason::StepSizeUnderflow: return "StepSizeUnderflow";
  }
  return "?";
}

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

bool finite(const Eigen::Vector2d& v) { return std::isfinite(v(0)) && std::isfinite(v(1)); }

}  // namespace

TruncationReason DormandPrince::advance(double& x, Eigen::Vector2d& y, double target, const Guard& guard) {
  const double dir = target >= x ? 1.0 : -1.0;
  if (h_ == 0.0 || (h_ > 0) != (dir > 0)) h_ = dir * std::max(1e-6, 1e-3 * std::abs(target - x));
  while ((target - x) * dir > 0) {
    double h = h_;
    bool last = false;
    if ((x + h - target) * dir >= 0) {
      h = target - x;
      last = true;
    }
    if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(x)) && !last) return TruncationReason::StepSizeUnderflow;
    const Eigen::Vector2d k1 = f_(x, y);
    const Eigen::Vector2d k2 = f_(x + c2 * h, y + h * (a21 * k1));
    const Eigen::Vector2d k3 = f_(x + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const Eigen::Vector2d k4 = f_(x + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Eigen::Vector2d k5 = f_(x + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Eigen::Vector2d k6 = f_(x + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Eigen::Vector2d yn = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Eigen::Vector2d k7 = f_(x + h, yn);
    const Eigen::Vector2d err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double norm = 0.0;
    bool ok = finite(yn) && finite(err);
    if (ok) {
      for (int i = 0; i < 2; ++i) {
        const double sc = atol_ + rtol_ * std::max(std::abs(y(i)), std::abs(yn(i)));
        norm = std::max(norm, std::abs(err(i)) / sc);
      }
    }
    if (!ok || norm > 1.0) {
      const double fac = ok ? std::max(0.2, 0.9 * std::pow(norm, -0.2)) : 0.25;
      h_ = h * fac;
      if (std::abs(h_) < 1e-14 * std::max(1.0, std::abs(x))) return TruncationReason::StepSizeUnderflow;
      continue;
    }
    const TruncationReason r = guard(x + h, yn);
    if (r != TruncationReason::None) return r;
    x = last ? target : x + h;
    y = yn;
    const double fac = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
    if (!last) h_ = h * fac;
  }
  return TruncationReason::None;
}

OracleResult ode_oracle(const SolveRequest& req, const OdeAnchor& anchor, const std::vector<double>& outputs) {
  const NormParameter p = req.p;
  const WeingartenRelation rel = req.relation;
  const double constant = first_integral_constant(req);
  if (anchor.dalpha == 0.0 || !(anchor.alpha > 0.0)) throw PreconditionError("oracle anchor needs alpha > 0 and alpha' != 0");
  {
    const double du = 1.0 / anchor.dalpha;
    const double value = first_integral_value(req, anchor.alpha, du);
    const double scale = std::max({1.0, std::abs(value), std::abs(constant)});
    if (std::abs(value - constant) > 1e-10 * scale)
      throw PreconditionError("oracle anchor is inconsistent with the first integral");
  }
  const double two_m = p.even();
  const int q = p.odd();
  DormandPrince::Rhs rhs;
  if (rel.form == RelationForm::K2Const) {
    const double s = anchor.dalpha > 0 ? 1.0 : -1.0;
    rhs = [=](double, const Eigen::Vector2d& y) {
      const double base = std::pow(-rel.mu * y(0), -two_m) - 1.0;
      const double a1 = s * std::pow(std::max(base, 0.0), double(q) / two_m);
      return Eigen::Vector2d(a1, 0.0);
    };
  } else {
    rhs = [=](double, const Eigen::Vector2d& y) {
      const double a1 = y(1);
      const double A = signed_odd_root_pow(a1, p.even(), q) + 1.0;
      const double w = signed_odd_root_pow(a1, p.even() - 2, q);
      const double a2 = q * std::pow(A, (two_m + 1.0) / two_m) * w * (rel.mu + rel.lambda * std::pow(A, -1.0 / two_m) / y(0));
      return Eigen::Vector2d(a1, a2);
    };
  }
  const double flat = 1e-3 * std::min(1.0, std::abs(anchor.dalpha));
  const double steep = 1e3 * std::max(1.0, std::abs(anchor.dalpha));
  DormandPrince::Guard guard = [&](double, const Eigen::Vector2d& y) {
    double a1 = y(1);
    if (rel.form == RelationForm::K2Const) {
      const double base = std::pow(-rel.mu * y(0), -two_m) - 1.0;
      if (!(base > 0)) return TruncationReason::AxisOfSymmetryOfProfile;
      a1 = std::pow(base, double(q) / two_m);
    }
    if (y(0) < 1e-3) return TruncationReason::RadiusVanished;
    if (std::abs(a1) < flat) return TruncationReason::AxisOfSymmetryOfProfile;
    if (std::abs(a1) > steep) return TruncationReason::SlopeBlowup;
    return TruncationReason::None;
  };

  DormandPrince dp(rhs, 1e-13, 1e-15);
  OracleResult out;
  double x = anchor.u;
  Eigen::Vector2d y(anchor.alpha, anchor.dalpha);
  for (double target : outputs) {
    const TruncationReason r = dp.advance(x, y, target, guard);
    if (r != TruncationReason::None) {
      out.reason = r;
      break;
    }
    out.u.push_back(target);
    out.alpha.push_back(y(0));
    out.dalpha.push_back(rel.form == RelationForm::K2Const ? rhs(x, y)(0) : y(1));
  }
  out.reached_u = x;
  return out;
}

OracleComparison compare_with_oracle(const ProfileBranch& br, double epsilon) {
  const Eigen::Index n = br.size();
  Eigen::Index anchor = -1;
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const double du = br.du(i);
    if (!std::isfinite(du) || du == 0.0 || br.alpha(i) < 1e-2) continue;
    const double score = std::abs(std::log(std::abs(du))) + 0.01 * std::abs(double(i) - double(n) / 2) / n;
    if (score < best) {
      best = score;
      anchor = i;
    }
  }
  if (anchor < 0) throw PreconditionError("no usable oracle anchor on the branch");
  OdeAnchor a{br.u(anchor), br.alpha(anchor), 1.0 / br.du(anchor)};
  OracleComparison cmp;
  auto in_zone = [&](double t) {
    const DomainInterval& d = br.domain;
    return (d.singular_lower() && t - d.lower < epsilon) || (d.singular_upper() && d.upper - t < epsilon);
  };
  for (int side = 0; side < 2; ++side) {
    std::vector<double> targets;
    std::vector<Eigen::Index> idx;
    if (side == 0) {
      for (Eigen::Index i = anchor + 1; i < n; ++i) {
        targets.push_back(br.u(i));
        idx.push_back(i);
      }
    } else {
      for (Eigen::Index i = anchor - 1; i >= 0; --i) {
        targets.push_back(br.u(i));
        idx.push_back(i);
      }
    }
    OracleResult r = ode_oracle(br.request, a, targets);
    (side == 0 ? cmp.upper_reason : cmp.lower_reason) = r.reason;
    for (std::size_t j = 0; j < r.alpha.size(); ++j) {
      if (in_zone(br.alpha(idx[j]))) continue;
      cmp.max_deviation = std::max(cmp.max_deviation, std::abs(r.alpha[j] - br.alpha(idx[j])));
      ++cmp.compared;
    }
  }
  return cmp;
}

}  // namespace rlw
