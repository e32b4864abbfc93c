#pragma once

// Stage one: penalty decomposition. For an increasing penalty rho, block
// coordinate descent alternates the x-block (volatility-constrained quadratic)
// and the y-block (sparse unit projection) of
//
//   min q_rho(x, y) = x^T M x + rho ||x - y||^2   s.t.  x^T A x >= phi,  y in Y.

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "mrp/model.hpp"
#include "mrp/restricted_qcqp.hpp"

namespace mrp {

struct PdConfig {
  double rho0 = 1.0;
  double growth = std::sqrt(10.0);
  double inner_tol = 5e-3;
  double outer_tol = 5e-4;
  int max_inner = 500;
  int max_outer = 40;

  /// Throws InvalidInput when a field is out of range.
  void validate() const;
};

struct PenaltyState {
  Vector x;
  Vector y;
  double rho = 0.0;
  std::vector<double> q_history;  // q_rho(x^s, y^s), s = 1, 2, ...
  int iterations = 0;
  bool converged = false;
  bool stationary_q = false;  // stopped because q did not change
};

/// Block coordinate descent for a fixed rho, started from y0 (unit, k-sparse).
/// Not converging within max_inner is reported through the state, not thrown.
PenaltyState bcd_solve(const ProblemInstance& inst, double rho, const Vector& y0,
                       const PdConfig& cfg);

struct PdDiagnostics {
  int outer_iterations = 0;
  int nonconverged_inner = 0;
  int total_inner = 0;
  double final_rho = 0.0;
  double final_xy_gap = 0.0;  // ||x^j - y^j||_inf at exit
  bool outer_converged = false;
  double max_x_norm = 0.0;    // over outer iterates
  double x_norm_bound = 0.0;  // max(sqrt(phi / lambda_min(A)), 1)
  std::vector<double> xy_gap_history;
  std::vector<std::vector<double>> q_histories;  // one per outer iteration

  // Raw y-block at exit.
  double y_block_objective = 0.0;
  double y_block_variance = 0.0;
  double y_block_kkt_residual = 0.0;

  // Stage-one output (polished on L).
  double kkt_residual = 0.0;
  double kkt_lambda = 0.0;
  double kkt_mu = 0.0;
  bool robinson = true;
  bool support_fallback = false;  // L was infeasible; fell back to the searched support
};

struct PdResult {
  Vector x_star;
  IndexSet L;
  double objective = 0.0;
  Vector y_block;
  DualCertificate cert;
  PdDiagnostics diagnostics;
};

/// Searches for some size-k support able to reach the volatility threshold.
/// Throws Infeasible when none is found.
IndexSet find_feasible_support(const ProblemInstance& inst);

/// e_i for the largest A_ii when A_ii >= phi; otherwise the leading
/// eigenvector of A on a feasible support.
Vector default_start(const ProblemInstance& inst);

/// L: support of y padded to size k with the smallest unused indices.
IndexSet padded_support(const Vector& y, std::size_t k);

PdResult pd_solve(const ProblemInstance& inst, const PdConfig& cfg,
                  const std::optional<Vector>& y00 = std::nullopt);

}  // namespace mrp
