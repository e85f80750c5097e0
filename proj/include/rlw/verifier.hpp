#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rlw/ode.hpp"
#include "rlw/profile_solver.hpp"

namespace rlw {

inline constexpr int kReportSchemaVersion = 1;

struct ExcludedZone {
  double lower = 0.0;
  double upper = 0.0;
  std::string reason;
};

struct AxisLimitReport {
  bool u2_limit_exists = false;
  bool curvatures_extend = false;
  double u2_limit = 0.0;
  double k1_limit = 0.0;
  double k2_limit = 0.0;
  // |last sample - extrapolated limit| for k1 and k2 (0 when no limit exists).
  double k1_gap = 0.0;
  double k2_gap = 0.0;
};

struct VerificationReport {
  std::string branch_id;
  std::string case_tag;
  double epsilon = 1e-3;
  double tol = 1e-6;
  double residual_max = 0.0;
  double residual_rms = 0.0;
  std::size_t evaluated = 0;
  std::vector<ExcludedZone> excluded_zones;
  bool oracle_checked = false;
  double oracle_max_dev = 0.0;
  std::size_t oracle_compared = 0;
  double first_integral_drift = 0.0;
  std::optional<AxisLimitReport> axis_limits;
  std::vector<std::string> warnings;

  bool passed() const { return residual_max < tol; }
};

// Profile table as read back from disk.
struct ProfileTable {
  Eigen::ArrayXd alpha;
  Eigen::ArrayXd u;
  Eigen::ArrayXd du;
};

// Domain information for table scans; inferred from the table when absent.
struct TableHints {
  std::optional<DomainInterval> domain;
};

// Limit of a geometric-rate sequence by Aitken extrapolation; exists when successive differences contract.
struct SequenceLimit {
  bool exists = false;
  double value = 0.0;
  double gap = 0.0;  // |last term - limit|
};

SequenceLimit sequence_limit(const std::vector<double>& terms);

// 5-point central difference.
double central_difference(const std::function<double(double)>& f, double x, double h);

// Curvatures in the GraphOverAxis orientation from the radial slope and its derivative.
PrincipalCurvatures<double> curvatures_from_slope(const NormParameter& p, double alpha, double du, double d2u);

// Curvatures from the closed-form slope and a 5-point finite-difference second derivative.
PrincipalCurvatures<double> fd_curvatures(const ProfileBranch& branch, double alpha);

VerificationReport residual_scan(const ProfileBranch& branch, double epsilon = 1e-3, double tol = 1e-6,
                                 std::optional<WeingartenRelation> relation = std::nullopt);

VerificationReport residual_scan_table(const ProfileTable& table, const NormParameter& p,
                                       const WeingartenRelation& relation, const TableHints& hints = {},
                                       double epsilon = 1e-3, double tol = 1e-6);

ProfileTable table_of(const ProfileBranch& branch);

double first_integral_drift(const ProfileBranch& branch);

AxisLimitReport axis_limits(const ProfileBranch& branch);

// Residual scan, first-integral drift, oracle comparison and (for axis branches) axis limits.
VerificationReport verify_branch(const ProfileBranch& branch, double epsilon = 1e-3, double tol = 1e-6);

}  // namespace rlw
