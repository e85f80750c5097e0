#include "rlw/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rlw/errors.hpp"

namespace rlw {

namespace {

constexpr double kSlopeSwitch = 10.0;
constexpr double kCapQ = 1e-6;

double fd5(const std::function<double(double)>& f, double x, double h) {
  return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

PrincipalCurvatures<double> radial(const NormParameter& p, double alpha, double w, double dw) {
  ProfileJet<double> jet{Chart::GraphOverRadius, 0.0, w, dw, alpha};
  return to_axis_orientation(principal_curvatures(p, jet), jet);
}

PrincipalCurvatures<double> axial(const NormParameter& p, double alpha, double a1, double a2) {
  ProfileJet<double> jet{Chart::GraphOverAxis, alpha, a1, a2, alpha};
  return principal_curvatures(p, jet);
}

double singular_distance(const DomainInterval& d, double t) {
  double dist = std::numeric_limits<double>::infinity();
  if (d.singular_lower()) dist = std::min(dist, t - d.lower);
  if (d.singular_upper()) dist = std::min(dist, d.upper - t);
  return dist;
}

// Fornberg weights for the first derivative at x0 on nodes x.
std::vector<double> derivative_weights(double x0, const std::vector<double>& x) {
  const int n = int(x.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(2, 0.0));
  double c1 = 1.0, c4 = x[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, 1);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][1];
  return w;
}

double apply_weights(const std::vector<double>& w, const std::vector<double>& y, std::size_t offset) {
  double s = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * y[j + offset];
  return s;
}

// dy/dalpha on a 7-row window: polynomial in alpha or ratio of derivatives in the row index, whichever
// agrees better with its own 5-row estimate.
double table_derivative(double a, double row, int center, const std::vector<double>& xs, const std::vector<double>& idx,
                        const std::vector<double>& ys) {
  const std::size_t off = std::size_t(std::clamp(center - 2, 0, 2));
  const std::vector<double> xs5(xs.begin() + off, xs.begin() + off + 5), idx5(idx.begin() + off, idx.begin() + off + 5);
  const double p7 = apply_weights(derivative_weights(a, xs), ys, 0);
  const double p5 = apply_weights(derivative_weights(a, xs5), ys, off);
  const std::vector<double> w7 = derivative_weights(row, idx), w5 = derivative_weights(row, idx5);
  const double r7 = apply_weights(w7, ys, 0) / apply_weights(w7, xs, 0);
  const double r5 = apply_weights(w5, ys, off) / apply_weights(w5, xs, off);
  if (!std::isfinite(r7) || !std::isfinite(r5)) return p7;
  return std::abs(p7 - p5) <= std::abs(r7 - r5) ? p7 : r7;
}

void add_zone(std::vector<ExcludedZone>& zones, double lo, double hi, const std::string& reason) {
  if (!zones.empty() && zones.back().reason == reason && lo <= zones.back().upper) {
    zones.back().upper = std::max(zones.back().upper, hi);
    return;
  }
  zones.push_back({lo, hi, reason});
}

void finish_stats(VerificationReport& rep, double sum_sq) {
  rep.residual_rms = rep.evaluated ? std::sqrt(sum_sq / double(rep.evaluated)) : 0.0;
}

std::string kind_reason(EndpointKind kind) { return "within epsilon of " + to_string(kind) + " endpoint"; }

}  // namespace

SequenceLimit sequence_limit(const std::vector<double>& v) {
  SequenceLimit out;
  const std::size_t n = v.size();
  if (n < 4) return out;
  for (double x : v)
    if (!std::isfinite(x)) return out;
  const double last = v[n - 1];
  std::vector<double> d;
  for (std::size_t j = n - 5; j + 1 < n; ++j) d.push_back(v[j + 1] - v[j]);
  const double tiny = 1e-7 * std::max(1.0, std::abs(last));
  bool negligible = true;
  for (double x : d) negligible = negligible && std::abs(x) <= tiny;
  double ratio = 0.0;
  int cnt = 0;
  for (std::size_t j = 1; j < d.size(); ++j) {
    if (std::abs(d[j - 1]) <= tiny) continue;
    ratio += std::abs(d[j]) / std::abs(d[j - 1]);
    ++cnt;
  }
  if (cnt) ratio /= cnt;
  out.exists = negligible || (cnt > 0 && ratio < 0.95);
  if (!out.exists) return out;
  const double s0 = v[n - 3], s1 = v[n - 2], s2 = v[n - 1];
  const double denom = (s2 - s1) - (s1 - s0);
  out.value = std::abs(denom) > 1e-300 && std::abs(s2 - s1) > tiny ? s2 - (s2 - s1) * (s2 - s1) / denom : s2;
  out.gap = std::abs(last - out.value);
  return out;
}

double central_difference(const std::function<double(double)>& f, double x, double h) { return fd5(f, x, h); }

PrincipalCurvatures<double> curvatures_from_slope(const NormParameter& p, double alpha, double du, double d2u) {
  if (std::abs(du) <= kSlopeSwitch) return radial(p, alpha, du, d2u);
  return axial(p, alpha, 1.0 / du, -d2u / (du * du * du));
}

PrincipalCurvatures<double> fd_curvatures(const ProfileBranch& br, double alpha) {
  double dist = singular_distance(br.domain, alpha);
  if (br.domain.lower_kind == EndpointKind::SmoothCap) dist = std::min(dist, alpha - br.domain.lower);
  if (br.domain.upper_kind == EndpointKind::SmoothCap) dist = std::min(dist, br.domain.upper - alpha);
  double h = std::min(1e-4 * alpha, 0.004 * dist);
  h = std::max(h, 1e-13 * std::max(1.0, alpha));
  const double w = br.du_at(alpha);
  if (std::abs(w) <= kSlopeSwitch) {
    const double dw = fd5([&](double t) { return br.du_at(t); }, alpha, h);
    return radial(br.request.p, alpha, w, dw);
  }
  const double r = 1.0 / w;
  const double dr = fd5([&](double t) { return 1.0 / br.du_at(t); }, alpha, h);
  return axial(br.request.p, alpha, r, dr * r);
}

VerificationReport residual_scan(const ProfileBranch& br, double epsilon, double tol,
                                 std::optional<WeingartenRelation> relation) {
  if (br.size() < 32) throw PreconditionError("residual scan needs at least 32 samples");
  const WeingartenRelation rel = relation.value_or(br.request.relation);
  VerificationReport rep;
  rep.branch_id = br.id();
  rep.case_tag = std::string(to_string(br.tag));
  rep.epsilon = epsilon;
  rep.tol = tol;
  if (epsilon < 1e-4)
    rep.warnings.push_back("epsilon below 1e-4: residuals close to singular endpoints are included and may grow");
  const DomainInterval& d = br.domain;
  if (d.singular_lower()) add_zone(rep.excluded_zones, d.lower, d.lower + epsilon, kind_reason(d.lower_kind));
  double sum_sq = 0.0;
  double near_band = 0.0;
  for (Eigen::Index i = 0; i < br.size(); ++i) {
    const double a = br.alpha(i);
    if (d.singular_lower() && a - d.lower < epsilon) continue;
    if (d.singular_upper() && d.upper - a < epsilon) continue;
    if (!std::isfinite(br.du(i)) || q_from_radial_slope(br.request.p, br.du(i)) < kCapQ) {
      add_zone(rep.excluded_zones, a, a, "u' vanishes at a smooth cap");
      continue;
    }
    const double res = std::abs(rel.residual(fd_curvatures(br, a)));
    if (!std::isfinite(res)) {
      add_zone(rep.excluded_zones, a, a, "non-finite curvature evaluation");
      continue;
    }
    rep.residual_max = std::max(rep.residual_max, res);
    sum_sq += res * res;
    ++rep.evaluated;
    if (singular_distance(d, a) < 1e-3) near_band = std::max(near_band, res);
  }
  if (d.singular_upper()) add_zone(rep.excluded_zones, d.upper - epsilon, d.upper, kind_reason(d.upper_kind));
  finish_stats(rep, sum_sq);
  if (epsilon < 1e-4 && near_band > tol)
    rep.warnings.push_back("residual grows to " + std::to_string(near_band) + " inside the 1e-3 endpoint band");
  return rep;
}

ProfileTable table_of(const ProfileBranch& br) { return {br.alpha, br.u, br.du}; }

VerificationReport residual_scan_table(const ProfileTable& t, const NormParameter& p, const WeingartenRelation& rel,
                                       const TableHints& hints, double epsilon, double tol) {
  const Eigen::Index n = t.alpha.size();
  if (n < 32) throw PreconditionError("residual scan needs at least 32 samples");
  if (t.u.size() != n || t.du.size() != n) throw PreconditionError("profile table columns differ in length");
  VerificationReport rep;
  rep.branch_id = "table";
  rep.epsilon = epsilon;
  rep.tol = tol;
  if (epsilon < 1e-4)
    rep.warnings.push_back("epsilon below 1e-4: residuals close to singular endpoints are included and may grow");
  DomainInterval d;
  if (hints.domain) {
    d = *hints.domain;
  } else {
    auto infer = [&](Eigen::Index i, bool upper) {
      const double du = t.du(i);
      if (std::isinf(du)) return EndpointKind::SimpleRoot;
      if (!upper && t.alpha(i) <= 1e-5) return EndpointKind::AxisZero;
      if (std::abs(du) > 1e3) return EndpointKind::DoubleRoot;
      if (upper && t.alpha(i) > 100.0 * t.alpha(n / 2)) return EndpointKind::Unbounded;
      return EndpointKind::SmoothCap;
    };
    d.lower_kind = infer(0, false);
    d.upper_kind = infer(n - 1, true);
    d.lower = d.lower_kind == EndpointKind::AxisZero ? 0.0 : t.alpha(0);
    d.upper = t.alpha(n - 1);
  }
  if (d.singular_lower()) add_zone(rep.excluded_zones, d.lower, d.lower + epsilon, kind_reason(d.lower_kind));
  double sum_sq = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = t.alpha(i);
    if (d.singular_lower() && a - d.lower < epsilon) continue;
    if (d.singular_upper() && d.upper - a < epsilon) continue;
    const double w = t.du(i);
    if (!std::isfinite(w) || q_from_radial_slope(p, w) < kCapQ) {
      add_zone(rep.excluded_zones, a, a, "u' vanishes at a smooth cap");
      continue;
    }
    const bool inverted = std::abs(w) > kSlopeSwitch;
    const int q = p.odd();
    // 1/u' in the axial chart, the odd root of u' (smooth through caps) in the radial chart
    auto value = [&](Eigen::Index j) { return inverted ? 1.0 / t.du(j) : signed_odd_root_pow(t.du(j), 1, q); };
    Eigen::Index lo = std::clamp<Eigen::Index>(i - 3, 0, std::max<Eigen::Index>(0, n - 7));
    std::vector<double> xs, ys, idx;
    bool ok = true;
    for (Eigen::Index j = lo; j < lo + 7; ++j) {
      const double y = value(j);
      if (!std::isfinite(y)) {
        ok = false;
        break;
      }
      xs.push_back(t.alpha(j));
      ys.push_back(y);
      idx.push_back(double(j));
    }
    if (!ok) {
      add_zone(rep.excluded_zones, a, a, "stencil touches a non-finite slope");
      continue;
    }
    const double dy = table_derivative(a, double(i), int(i - lo), xs, idx, ys);
    const double y0 = value(i);
    const double dw = inverted ? dy : q * std::pow(std::abs(y0), q - 1) * dy;
    const PrincipalCurvatures<double> k = inverted ? axial(p, a, 1.0 / w, dw / w) : radial(p, a, w, dw);
    const double res = std::abs(rel.residual(k));
    if (!std::isfinite(res)) {
      add_zone(rep.excluded_zones, a, a, "non-finite curvature evaluation");
      continue;
    }
    rep.residual_max = std::max(rep.residual_max, res);
    sum_sq += res * res;
    ++rep.evaluated;
  }
  if (d.singular_upper()) add_zone(rep.excluded_zones, d.upper - epsilon, d.upper, kind_reason(d.upper_kind));
  finish_stats(rep, sum_sq);
  return rep;
}

double first_integral_drift(const ProfileBranch& br) {
  const SolveRequest& req = br.request;
  const double c = first_integral_constant(req);
  const WeingartenRelation& r = req.relation;
  double drift = 0.0;
  for (Eigen::Index i = 0; i < br.size(); ++i) {
    const double a = br.alpha(i), du = br.du(i);
    const double Q = q_from_radial_slope(req.p, du);
    double scale = 1.0;
    switch (r.form) {
      case RelationForm::Homogeneous: scale = std::max(1.0, std::abs(std::pow(a, r.lambda) * Q)); break;
      case RelationForm::InhomLambdaMinus1: scale = std::max({1.0, Q / a, std::abs(r.mu * std::log(a))}); break;
      case RelationForm::InhomGeneral:
        scale = std::max({1.0, std::pow(a, r.lambda) * Q, std::abs(r.mu * std::pow(a, r.lambda + 1.0) / (r.lambda + 1.0))});
        break;
      default: break;
    }
    drift = std::max(drift, std::abs(first_integral_value(req, a, du) - c) / scale);
  }
  return drift;
}

AxisLimitReport axis_limits(const ProfileBranch& br) {
  if (br.domain.lower_kind != EndpointKind::AxisZero) throw PreconditionError("branch has no axis endpoint");
  const double top = std::isinf(br.domain.upper) ? 1.0 : br.domain.upper;
  const double a0 = std::min(1e-2, 0.1 * top);
  std::vector<double> u2, k1, k2;
  for (int j = 0; j < 24; ++j) {
    const double a = a0 * std::ldexp(1.0, -j);
    u2.push_back(fd5([&](double t) { return br.du_at(t); }, a, 1e-3 * a));
    const PrincipalCurvatures<double> k = fd_curvatures(br, a);
    k1.push_back(k.k1);
    k2.push_back(k.k2);
  }
  AxisLimitReport rep;
  const SequenceLimit lu = sequence_limit(u2), l1 = sequence_limit(k1), l2 = sequence_limit(k2);
  rep.u2_limit_exists = lu.exists;
  rep.u2_limit = lu.value;
  rep.curvatures_extend = l1.exists && l2.exists;
  rep.k1_limit = l1.value;
  rep.k2_limit = l2.value;
  rep.k1_gap = l1.gap;
  rep.k2_gap = l2.gap;
  return rep;
}

VerificationReport verify_branch(const ProfileBranch& br, double epsilon, double tol) {
  VerificationReport rep = residual_scan(br, epsilon, tol);
  rep.first_integral_drift = first_integral_drift(br);
  try {
    OracleComparison cmp = compare_with_oracle(br, epsilon);
    rep.oracle_checked = true;
    rep.oracle_max_dev = cmp.max_deviation;
    rep.oracle_compared = cmp.compared;
  } catch (const PreconditionError& e) {
    rep.warnings.push_back(std::string("oracle skipped: ") + e.what());
  }
  if (br.domain.lower_kind == EndpointKind::AxisZero) rep.axis_limits = axis_limits(br);
  return rep;
}

}  // namespace rlw
