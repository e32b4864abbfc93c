#pragma once

// Problem instance, solution types and the first-order diagnostics for
//
//   min x^T M x  s.t.  x^T A x >= phi,  x^T x = 1,  ||x||_0 <= k.

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "mrp/numerics.hpp"

namespace mrp {

/// Sorted, duplicate-free set of asset indices (0-based). Comparison is
/// lexicographic on the sorted sequence; every tie-break in the library uses it.
class IndexSet {
 public:
  IndexSet() = default;
  IndexSet(std::initializer_list<std::size_t> idx);
  explicit IndexSet(std::vector<std::size_t> idx);

  static IndexSet range(std::size_t n);

  std::size_t size() const noexcept { return idx_.size(); }
  bool empty() const noexcept { return idx_.empty(); }
  std::size_t operator[](std::size_t i) const { return idx_[i]; }
  auto begin() const noexcept { return idx_.begin(); }
  auto end() const noexcept { return idx_.end(); }
  const std::vector<std::size_t>& values() const noexcept { return idx_; }

  bool contains(std::size_t i) const;
  IndexSet united(const IndexSet& other) const;
  IndexSet complement(std::size_t n) const;

  friend bool operator==(const IndexSet&, const IndexSet&) = default;
  friend auto operator<=>(const IndexSet& a, const IndexSet& b) { return a.idx_ <=> b.idx_; }

 private:
  std::vector<std::size_t> idx_;
};

/// The quadruple (M, A, phi, k). M and A must be positive definite with
/// lambda_min > 1e-10 * lambda_max; 1 <= k <= N; phi > 0.
class ProblemInstance {
 public:
  ProblemInstance(SymMatrix m, SymMatrix a, double phi, std::size_t k);

  const SymMatrix& M() const noexcept { return m_; }
  const SymMatrix& A() const noexcept { return a_; }
  double phi() const noexcept { return phi_; }
  std::size_t k() const noexcept { return k_; }
  std::size_t N() const noexcept { return m_.order(); }
  double lambda_min_A() const noexcept { return lambda_min_a_; }

 private:
  SymMatrix m_;
  SymMatrix a_;
  double phi_;
  std::size_t k_;
  double lambda_min_a_;
};

/// Multipliers of  M x - lambda A x + mu x + w = 0,  w_L = 0.
struct KktCertificate {
  double lambda = 0.0;
  double mu = 0.0;
  Vector w;
  double residual = 0.0;
};

/// Feasible k-sparse unit portfolio. make() validates feasibility and throws
/// InvalidSolution if any constraint is violated beyond tolerance.
class PortfolioSolution {
 public:
  static PortfolioSolution make(const ProblemInstance& inst, Vector x, IndexSet support);

  const Vector& x() const noexcept { return x_; }
  const IndexSet& support() const noexcept { return support_; }
  double objective() const noexcept { return objective_; }
  double variance() const noexcept { return variance_; }
  double kkt_residual() const noexcept { return kkt_.residual; }
  const KktCertificate& kkt() const noexcept { return kkt_; }
  bool active_constraint() const noexcept { return active_; }
  bool robinson() const noexcept { return robinson_; }

 private:
  PortfolioSolution() = default;

  Vector x_;
  IndexSet support_;
  double objective_ = 0.0;
  double variance_ = 0.0;
  KktCertificate kkt_;
  bool active_ = false;
  bool robinson_ = true;
};

/// True iff lambda_max(A_II) >= phi (relative tolerance 1e-10), i.e. the
/// restricted problem on I has a feasible point.
bool support_feasible(const ProblemInstance& inst, const IndexSet& idx);

/// Least-squares multipliers for the stationarity system restricted to L.
KktCertificate kkt_residual(const ProblemInstance& inst, const Vector& x, const IndexSet& L);

/// Constraint qualification at x: always true when the volatility constraint
/// is inactive; otherwise {(Ax)_L, x_L} must be linearly independent.
bool robinson_check(const ProblemInstance& inst, const Vector& x, const IndexSet& L);

/// x^T M x
double objective(const ProblemInstance& inst, const Vector& x);

}  // namespace mrp
