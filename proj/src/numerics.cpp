#include "mrp/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <fmt/core.h>

#include "mrp/errors.hpp"

namespace mrp {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kOffDiagTol = 1e-12;
constexpr double kPivotTol = 1e-12;

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) sum += a(i, j) * a(i, j);
  return std::sqrt(sum);
}

// One Jacobi rotation zeroing a(p, q); accumulates into v.
void rotate(Matrix& a, Matrix& v, Eigen::Index p, Eigen::Index q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double theta = (a(p, p) - a(q, q)) / (2.0 * apq);
  const double sgn = theta >= 0.0 ? 1.0 : -1.0;
  const double t = -sgn / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;
  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double g = a(k, p);
    const double h = a(k, q);
    a(k, p) = c * g - s * h;
    a(k, q) = s * g + c * h;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const double g = a(p, k);
    const double h = a(q, k);
    a(p, k) = c * g - s * h;
    a(q, k) = s * g + c * h;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double g = v(k, p);
    const double h = v(k, q);
    v(k, p) = c * g - s * h;
    v(k, q) = s * g + c * h;
  }
}

Vector lower_solve(const Matrix& l, const Vector& b) {
  return l.triangularView<Eigen::Lower>().solve(b);
}

Vector upper_solve_transposed(const Matrix& l, const Vector& b) {
  return l.transpose().triangularView<Eigen::Upper>().solve(b);
}

}  // namespace

SymMatrix::SymMatrix(const Matrix& entries) {
  if (entries.rows() != entries.cols() || entries.rows() < 1)
    throw Error(ErrorKind::InvalidMatrix,
                fmt::format("symmetric matrix must be square and non-empty, got {}x{}",
                            entries.rows(), entries.cols()));
  m_ = 0.5 * (entries + entries.transpose());
}

SymMatrix SymMatrix::identity(std::size_t order) {
  const auto n = static_cast<Eigen::Index>(order);
  return SymMatrix(Matrix::Identity(n, n));
}

SymMatrix SymMatrix::diagonal(const Vector& diag) {
  return SymMatrix(Matrix(diag.asDiagonal()));
}

double SymMatrix::max_abs() const { return m_.cwiseAbs().maxCoeff(); }

bool SymMatrix::all_finite() const { return m_.allFinite(); }

void normalize_sign(Vector& v, double tol) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > tol) {
      if (v[i] < 0.0) v = -v;
      return;
    }
  }
}

EigDecomposition eig_sym(const SymMatrix& m) {
  if (!m.all_finite())
    throw Error(ErrorKind::InvalidMatrix, "eig_sym: matrix has non-finite entries");
  Matrix a = m.matrix();
  const Eigen::Index n = a.rows();
  Matrix v = Matrix::Identity(n, n);
  const double threshold = kOffDiagTol * a.norm();

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= threshold) break;
    for (Eigen::Index p = 0; p + 1 < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) rotate(a, v, p, q);
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });

  EigDecomposition out{Vector(n), Matrix(n, n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index src = order[static_cast<std::size_t>(j)];
    out.values[j] = a(src, src);
    Vector col = v.col(src);
    normalize_sign(col);
    out.vectors.col(j) = col;
  }
  return out;
}

Matrix cholesky_lower(const SymMatrix& m) {
  if (!m.all_finite())
    throw Error(ErrorKind::InvalidMatrix, "cholesky: matrix has non-finite entries");
  const Matrix& a = m.matrix();
  const Eigen::Index n = a.rows();
  const double pivot_floor = kPivotTol * m.max_abs();
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = a(j, j);
    for (Eigen::Index k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > pivot_floor))
      throw Error(ErrorKind::NotPositiveDefinite,
                  fmt::format("cholesky: pivot {} at column {} is not positive", d, j));
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

Vector solve_spd(const SymMatrix& m, const Vector& b) {
  if (b.size() != static_cast<Eigen::Index>(m.order()))
    throw Error(ErrorKind::InvalidInput, "solve_spd: dimension mismatch");
  const Matrix l = cholesky_lower(m);
  Vector x = upper_solve_transposed(l, lower_solve(l, b));
  // one step of iterative refinement
  const Vector r = b - m.matrix() * x;
  x += upper_solve_transposed(l, lower_solve(l, r));
  return x;
}

Vector PencilDecomposition::eigenvector(std::size_t j) const {
  Vector u = upper_solve_transposed(chol_a, whitened.col(static_cast<Eigen::Index>(j)));
  u /= u.norm();
  normalize_sign(u);
  return u;
}

PencilDecomposition pencil_eig(const SymMatrix& p, const SymMatrix& a) {
  if (p.order() != a.order())
    throw Error(ErrorKind::InvalidInput, "pencil: dimension mismatch");
  PencilDecomposition out;
  out.chol_a = cholesky_lower(a);
  // C = L^{-1} p L^{-T}
  const Matrix w = out.chol_a.triangularView<Eigen::Lower>().solve(p.matrix());
  const Matrix c = out.chol_a.triangularView<Eigen::Lower>().solve(w.transpose());
  auto eig = eig_sym(SymMatrix(c));
  out.values = std::move(eig.values);
  out.whitened = std::move(eig.vectors);
  return out;
}

double pencil_min_eig(const SymMatrix& p, const SymMatrix& a) {
  cholesky_lower(p);  // p must be SPD as well
  return pencil_eig(p, a).values[0];
}

Matrix principal_submatrix(const Matrix& m, const std::vector<std::size_t>& idx) {
  const auto k = static_cast<Eigen::Index>(idx.size());
  Matrix out(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      out(i, j) = m(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]),
                    static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)]));
  return out;
}

}  // namespace mrp
