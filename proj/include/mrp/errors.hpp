#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace mrp {

enum class ErrorKind {
  InvalidMatrix,
  NotPositiveDefinite,
  InvalidInput,
  InvalidIndexSet,
  InvalidSolution,
  ZeroVector,
  ConvergenceFailure,
  Infeasible,
  DualUnbounded,
  DegenerateFace,
  IngestError,
  InsufficientData,
  EstimationError,
  InvalidPrice,
  NoVolatility,
};

std::string_view to_string(ErrorKind kind);

/// Base exception for every failure raised by the library. The kind is what
/// callers (the CLI in particular) dispatch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Root finding gave up; the best iterate found so far is kept.
class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& message, Eigen::VectorXd best)
      : Error(ErrorKind::ConvergenceFailure, message), best_(std::move(best)) {}

  const Eigen::VectorXd& best_iterate() const noexcept { return best_; }

 private:
  Eigen::VectorXd best_;
};

/// No pair of near-null vectors brackets the trace constraint.
class DegenerateFace : public Error {
 public:
  DegenerateFace(const std::string& message, Eigen::MatrixXd basis)
      : Error(ErrorKind::DegenerateFace, message), basis_(std::move(basis)) {}

  const Eigen::MatrixXd& face_basis() const noexcept { return basis_; }

 private:
  Eigen::MatrixXd basis_;
};

}  // namespace mrp
