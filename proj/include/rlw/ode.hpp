#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "rlw/profile_solver.hpp"

namespace rlw {

enum class TruncationReason { None, AxisOfSymmetryOfProfile, RadiusVanished, SlopeBlowup, StepSizeUnderflow };

std::string to_string(TruncationReason reason);

struct OdeAnchor {
  double u = 0.0;
  double alpha = 0.0;
  double dalpha = 0.0;
};

struct OracleResult {
  std::vector<double> u;
  std::vector<double> alpha;
  std::vector<double> dalpha;
  TruncationReason reason = TruncationReason::None;
  double reached_u = 0.0;
};

// Dormand-Prince 5(4) with step rejection; integrates y' = f(x, y) to each requested x in order.
class DormandPrince {
 public:
  using Rhs = std::function<Eigen::Vector2d(double, const Eigen::Vector2d&)>;
  // A reason other than None stops the integration at the last accepted state.
  using Guard = std::function<TruncationReason(double, const Eigen::Vector2d&)>;

  DormandPrince(Rhs f, double rtol, double atol) : f_(std::move(f)), rtol_(rtol), atol_(atol) {}

  TruncationReason advance(double& x, Eigen::Vector2d& y, double target, const Guard& guard);

 private:
  Rhs f_;
  double rtol_, atol_;
  double h_ = 0.0;
};

// Integrates the profile ODE of the relation as alpha(u) from the anchor to each value in outputs
// (outputs sorted by distance from the anchor on each side are handled internally).
OracleResult ode_oracle(const SolveRequest& req, const OdeAnchor& anchor, const std::vector<double>& outputs);

// Max |alpha_oracle - alpha_branch| over the samples reachable from an interior anchor.
struct OracleComparison {
  double max_deviation = 0.0;
  std::size_t compared = 0;
  TruncationReason lower_reason = TruncationReason::None;
  TruncationReason upper_reason = TruncationReason::None;
};

OracleComparison compare_with_oracle(const ProfileBranch& branch, double epsilon = 1e-3);

}  // namespace rlw
