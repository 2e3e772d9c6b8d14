#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace subzero {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Root of every error the library raises on purpose. Precondition violations
/// on arguments are reported with std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An oracle was asked about a point outside the problem domain.
class InfeasibleQueryError : public Error {
 public:
  using Error::Error;
};

/// The oracle handle has already answered `budget` queries.
class BudgetExhaustedError : public Error {
 public:
  using Error::Error;
};

/// An ellipsoid update produced a shape that is no longer safely positive
/// definite (or too badly conditioned to keep iterating on).
class DegenerateEllipsoidError : public Error {
 public:
  using Error::Error;
};

/// A configuration value is missing or malformed. `field()` names the key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// A problem instance does not satisfy an assumption the algorithms rely on
/// (e.g. the minimizer is too close to the boundary for the requested eps).
class AssumptionError : public Error {
 public:
  using Error::Error;
};

}  // namespace subzero
