#pragma once

// Global solver for the support-restricted problem
//
//   min u^T Q0 u  s.t.  u^T Q1 u <= -1,  u^T u = 1,      Q0 = M_II, Q1 = -A_II / phi,
//
// through its SDP relaxation  min Tr(Q0 Y) s.t. Tr(Q1 Y) (<= | =) -1, Tr(Y) = 1, Y >= 0.
// The relaxation's dual  max -y1 + y2  s.t.  Q0 - y1 Q1 - y2 I >= 0  collapses to the
// concave scalar problem  max_y1 h(y1) = -y1 + lambda_min(Q0 - y1 Q1).

#include <cstddef>

#include "mrp/model.hpp"
#include "mrp/numerics.hpp"

namespace mrp {

struct ReducedPair {
  SymMatrix Q0;  // positive definite
  SymMatrix Q1;  // negative definite
};

/// Validates Q0 > 0 > Q1 and same order.
ReducedPair make_reduced_pair(SymMatrix Q0, SymMatrix Q1);

/// Q0 = M_II, Q1 = -A_II / phi. Throws Infeasible when lambda_max(A_II) < phi.
ReducedPair reduce(const ProblemInstance& inst, const IndexSet& idx);

enum class DualForm {
  Inequality,  // Tr(Q1 Y) <= -1, multiplier y1 <= 0
  Equality,    // Tr(Q1 Y) == -1, y1 free
};

struct DualEvaluation {
  double value = 0.0;         // h(y1)
  double supergradient = 0.0; // -1 - v^T Q1 v
  double lambda_min = 0.0;    // y2
  Vector v;                   // unit eigenvector for lambda_min(Q0 - y1 Q1)
};

DualEvaluation evaluate_dual(const ReducedPair& q, double y1);

struct DualCertificate {
  double y1 = 0.0;
  double y2 = 0.0;
  double dual_value = 0.0;  // -y1 + y2
  double gap = 0.0;         // primal value - dual value, filled in by the primal step
  bool active = true;       // inequality Tr(Q1 Y) <= -1 is tight
  // Final localization bracket of the supergradient bisection. The stored
  // eigenvectors satisfy v_lo^T Q1 v_lo <= -1 <= v_hi^T Q1 v_hi.
  double y1_lo = 0.0;
  double y1_hi = 0.0;
  Vector v_lo;
  Vector v_hi;
  int iterations = 0;
};

/// Maximizes h over the admissible y1 range by supergradient bisection.
/// Throws DualUnbounded if no sign change is found within |y1| <= 1e12.
DualCertificate dual_maximize(const ReducedPair& q, DualForm form = DualForm::Equality);

/// PSD matrix kept with an explicit factor, Y = V V^T.
struct PsdSolution {
  SymMatrix Y;
  Matrix factor;
  std::size_t rank = 0;

  static PsdSolution from_factor(Matrix v);
  /// Factor from the eigendecomposition, dropping eigenvalues below
  /// 1e-12 * lambda_max.
  static PsdSolution from_matrix(const SymMatrix& y);
};

/// Primal solution of the relaxation supported on the near-null space of
/// Z = Q0 - y1 Q1 - y2 I (eigenvalues <= null_tol * scale).
PsdSolution recover_primal(const ReducedPair& q, const DualCertificate& cert,
                           double null_tol = 1e-7);

/// Reduces Y to rank one while preserving Tr(Y) and Tr(Q1 Y).
PsdSolution rank_reduce(const PsdSolution& y, const SymMatrix& Q1);

struct ReducedSolution {
  Vector upsilon;  // unit, first significant entry positive
  double value = 0.0;
  DualCertificate cert;
  bool eigen_shortcut = false;  // the minimum eigenvector of Q0 was feasible
};

/// Global solution of the reduced problem.
ReducedSolution solve_reduced(const ReducedPair& q);

struct RestrictedSolution {
  Vector x;  // embedded in R^N, zero off the support
  IndexSet support;
  double value = 0.0;
  DualCertificate cert;
  bool eigen_shortcut = false;
};

/// Global solution of the problem restricted to the given support.
/// Throws Infeasible when the support cannot reach the volatility threshold.
RestrictedSolution solve_restricted(const ProblemInstance& inst, const IndexSet& idx);

}  // namespace mrp
