#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rlw/norm_geometry.hpp"
#include "rlw/profile_law.hpp"
#include "rlw/singular_quadrature.hpp"

namespace rlw {

enum class RelationForm { K1Zero, K2Const, K1Const, Homogeneous, InhomLambdaMinus1, InhomGeneral };

std::string to_string(RelationForm form);

// k1 + lambda k2 = mu, or k2 = mu for K2Const.
struct WeingartenRelation {
  RelationForm form = RelationForm::InhomGeneral;
  double lambda = 0.0;
  double mu = 0.0;

  static WeingartenRelation k1_zero();
  static WeingartenRelation k2_const(double mu);
  static WeingartenRelation k1_const(double mu);
  static WeingartenRelation homogeneous(double lambda);
  static WeingartenRelation inhomogeneous(double lambda, double mu);
  // Picks the form from (lambda, mu) as k1 + lambda k2 = mu.
  static WeingartenRelation from_coefficients(double lambda, double mu);

  double residual(const PrincipalCurvatures<double>& k) const;
};

enum class CaseTag {
  C4i, C4ii, C4iii_1, C4iii_2,
  C5i_1, C5i_2, C5ii,
  C61i_1, C61i_2_1, C61i_2_2, C61i_3_1, C61i_3_2, C61ii,
  C63i, C63ii_1, C63ii_2, C63ii_3,
  C63iii_1, C63iii_2_1, C63iii_2_2, C63iii_3_1, C63iii_3_2,
  C63iv_1, C63iv_2, C63iv_3,
  C63v_1, C63v_2, C63v_3_1, C63v_3_2_1, C63v_3_2_2, C63v_3_3_1, C63v_3_3_2,
  C63vi
};

std::string_view to_string(CaseTag tag);
std::optional<CaseTag> case_from_string(std::string_view label);
const std::vector<CaseTag>& all_cases();

// c1 is the first integration constant (c2 for the homogeneous form, c for the cone slope Q).
// offset is the additive constant of the case (c, c2, c3, ... in closed forms; the base value otherwise).
struct SolveRequest {
  NormParameter p{2};
  WeingartenRelation relation;
  double c1 = 0.0;
  double offset = 0.0;
  int sign = 1;
  int samples = 512;
};

enum class AnchorSide { Lower, Upper, ClosedForm };

struct CaseInterval {
  CaseTag tag = CaseTag::C4i;
  DomainInterval domain;
  AnchorSide anchor = AnchorSide::Lower;
};

struct Classification {
  std::vector<CaseInterval> intervals;
  std::vector<std::string> warnings;
  double scale = 1.0;  // |mu| used for the internal normalization
  ProfileLaw law;

  CaseTag primary() const { return intervals.front().tag; }
};

Classification classify(const SolveRequest& req);

struct ProfileBranch {
  SolveRequest request;
  CaseTag tag = CaseTag::C4i;
  DomainInterval domain;
  ProfileLaw law;
  AnchorSide anchor = AnchorSide::Lower;
  int orientation = 1;

  Eigen::ArrayXd alpha;
  Eigen::ArrayXd u;
  Eigen::ArrayXd du;
  double u_lower = 0.0;
  double u_upper = 0.0;
  double error_estimate = 0.0;

  int sign() const { return request.sign; }
  Eigen::Index size() const { return alpha.size(); }
  std::string id() const;

  double du_at(double t) const;
  double d2u_at(double t) const;
  // Signed u-distance between the two domain endpoints (inf when divergent).
  double span() const { return u_upper - u_lower; }
  double u_at_endpoint(bool upper) const { return upper ? u_upper : u_lower; }
};

ProfileBranch solve(const SolveRequest& req, std::size_t interval = 0);
std::vector<ProfileBranch> solve_all(const SolveRequest& req);

ProfileBranch solve_constant_k2(NormParameter p, double c, int sign, double mu = -1.0, int samples = 512);
ProfileBranch solve_constant_k1(NormParameter p, double mu, double c1, double c2, int sign, int samples = 512);
ProfileBranch solve_k1_zero(NormParameter p, double q, double c, int sign, int samples = 512);
ProfileBranch solve_homogeneous(NormParameter p, double lambda, double c2, double c3, int sign, int samples = 512);
std::vector<ProfileBranch> solve_inhom_lambda_minus1(NormParameter p, double mu, double c1, int sign,
                                                     double offset = 0.0, int samples = 512);
std::vector<ProfileBranch> solve_inhom_general(NormParameter p, double lambda, double mu, double c1, int sign,
                                               double offset = 0.0, int samples = 512);

// Value of the relation's own first integral at a point with radial slope du (should equal the constant).
double first_integral_value(const SolveRequest& req, double alpha, double du);
double first_integral_constant(const SolveRequest& req);

}  // namespace rlw
