#pragma once

// Dense symmetric kernels shared by every solver stage.

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace mrp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Dense symmetric matrix. Construction symmetrizes the input as (E + E^T)/2,
/// so entries(i, j) == entries(j, i) holds bit for bit afterwards.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& entries);

  static SymMatrix identity(std::size_t order);
  static SymMatrix diagonal(const Vector& diag);

  std::size_t order() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  double max_abs() const;
  bool all_finite() const;

 private:
  Matrix m_;
};

struct EigDecomposition {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns, column j pairs with values[j]
};

/// Cyclic Jacobi eigendecomposition. Eigenvectors are sign-normalized so that
/// their first entry of magnitude above 1e-12 is positive.
/// Throws InvalidMatrix on non-finite input.
EigDecomposition eig_sym(const SymMatrix& m);

/// Lower Cholesky factor, L L^T = m. Throws NotPositiveDefinite when a pivot
/// falls to 1e-12 * max|m| or below.
Matrix cholesky_lower(const SymMatrix& m);

/// Solves m x = b for symmetric positive definite m.
Vector solve_spd(const SymMatrix& m, const Vector& b);

/// Eigen-structure of the pencil p v = mu a v for SPD p and a, computed in the
/// whitened basis C = L^{-1} p L^{-T}, a = L L^T.
struct PencilDecomposition {
  Matrix chol_a;        // L
  Vector values;        // ascending generalized eigenvalues
  Matrix whitened;      // eigenvectors of C (orthonormal)

  /// Generalized eigenvector for values[j], mapped back via L^{-T} and scaled
  /// to unit 2-norm with the first significant entry positive.
  Vector eigenvector(std::size_t j) const;
};

PencilDecomposition pencil_eig(const SymMatrix& p, const SymMatrix& a);

/// Smallest generalized eigenvalue of p v = mu a v.
double pencil_min_eig(const SymMatrix& p, const SymMatrix& a);

/// Principal submatrix on the given sorted indices.
Matrix principal_submatrix(const Matrix& m, const std::vector<std::size_t>& idx);

/// Flips the sign of v so its first entry with |v_i| > tol is positive.
void normalize_sign(Vector& v, double tol = 1e-12);

}  // namespace mrp
