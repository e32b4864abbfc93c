#pragma once

// Exact solvers for the two blocks of the penalty problem
//
//   q_rho(x, y) = x^T M x + rho ||x - y||^2,
//
// the x-block  min_x q_rho(x, y)  s.t. x^T A x >= phi  (global, via its dual),
// and the y-block  min_y ||y - x||^2  s.t. ||y|| = 1, ||y||_0 <= k.

#include <cstddef>
#include <vector>

#include "mrp/model.hpp"
#include "mrp/numerics.hpp"

namespace mrp {

struct PxResult {
  Vector x;
  double lambda = 0.0;      // multiplier of x^T A x >= phi
  double objective = 0.0;   // q_rho(x, y)
  double dual_value = 0.0;  // g(lambda)
  double gap = 0.0;         // |objective - dual_value|
  bool hard_case = false;
  int iterations = 0;
};

/// Concave dual of the x-block,
///   g(w) = rho ||y||^2 + w phi - rho^2 y^T (M + rho I - w A)^{-1} y,  0 <= w < w_bar,
/// evaluated in the eigenbasis of the pencil (M + rho I, A).
class PxDual {
 public:
  PxDual(const SymMatrix& M, const SymMatrix& A, double rho, const Vector& y, double phi);

  /// Right end of the dual domain: smallest eigenvalue of the pencil.
  double w_bar() const noexcept { return pencil_.values[0]; }
  double value(double w) const;
  /// x(w)^T A x(w) - phi  (equals -g'(w)); increasing in w.
  double constraint_gap(double w) const;
  double constraint_gap_derivative(double w) const;
  Vector primal(double w) const;

  const PencilDecomposition& pencil() const noexcept { return pencil_; }

 private:
  PencilDecomposition pencil_;
  Vector z_;  // Q^T L^{-1} rho y
  double rho_y2_;
  double phi_;
};

/// Global minimizer of the x-block. Throws InvalidInput on non-finite y and
/// ConvergenceFailure after 200 root-finding iterations.
PxResult solve_px(const SymMatrix& M, const SymMatrix& A, double rho, const Vector& y,
                  double phi);

struct SparseProjection {
  Vector y;
  IndexSet J;
};

/// Indices of the k largest |x_i|, ties broken by smaller index.
IndexSet top_k_indices(const Vector& x, std::size_t k);

/// Closed-form projection onto the k-sparse unit sphere. Throws ZeroVector
/// when x = 0.
SparseProjection solve_py(const Vector& x, std::size_t k);

/// x^T M x + rho ||x - y||^2
double penalty_objective(const SymMatrix& M, double rho, const Vector& x, const Vector& y);

}  // namespace mrp
