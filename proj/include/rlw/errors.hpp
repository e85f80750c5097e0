#pragma once

#include <stdexcept>
#include <string>

namespace rlw {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PreconditionError : Error {
  using Error::Error;
};

// Admissible set is empty; the message names the violated inequality.
struct NoSurface : Error {
  using Error::Error;
};

struct GluingMismatch : Error {
  using Error::Error;
};

struct NotPeriodic : Error {
  using Error::Error;
};

struct FormatError : Error {
  using Error::Error;
};

struct QuadratureError : Error {
  QuadratureError(const std::string& what, double estimate, double error)
      : Error(what), best_estimate(estimate), error_estimate(error) {}
  double best_estimate;
  double error_estimate;
};

}  // namespace rlw
