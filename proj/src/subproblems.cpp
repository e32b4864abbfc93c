#include "mrp/subproblems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>
#include <fmt/core.h>

#include "mrp/errors.hpp"

namespace mrp {

namespace {

constexpr int kMaxRootIterations = 200;
constexpr double kRootTol = 1e-10;
constexpr double kBracketShrink = 1e-8;
constexpr double kHardCaseReg = 1e-8;

void validate_px_inputs(const SymMatrix& M, const SymMatrix& A, double rho, const Vector& y,
                        double phi) {
  if (M.order() != A.order() || static_cast<std::size_t>(y.size()) != M.order())
    throw Error(ErrorKind::InvalidInput, "solve_px: dimension mismatch");
  if (!y.allFinite()) throw Error(ErrorKind::InvalidInput, "solve_px: y has non-finite entries");
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw Error(ErrorKind::InvalidInput, fmt::format("solve_px: rho must be positive, got {}", rho));
  if (!(phi > 0.0) || !std::isfinite(phi))
    throw Error(ErrorKind::InvalidInput, fmt::format("solve_px: phi must be positive, got {}", phi));
}

SymMatrix shifted(const SymMatrix& M, double rho) {
  const auto n = static_cast<Eigen::Index>(M.order());
  return SymMatrix(M.matrix() + rho * Matrix::Identity(n, n));
}

}  // namespace

double penalty_objective(const SymMatrix& M, double rho, const Vector& x, const Vector& y) {
  return x.dot(M.matrix() * x) + rho * (x - y).squaredNorm();
}

PxDual::PxDual(const SymMatrix& M, const SymMatrix& A, double rho, const Vector& y, double phi)
    : pencil_(pencil_eig(shifted(M, rho), A)), rho_y2_(rho * y.squaredNorm()), phi_(phi) {
  const Vector whitened_b =
      pencil_.chol_a.triangularView<Eigen::Lower>().solve(Vector(rho * y));
  z_ = pencil_.whitened.transpose() * whitened_b;
}

double PxDual::value(double w) const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < z_.size(); ++i) s += z_[i] * z_[i] / (pencil_.values[i] - w);
  return rho_y2_ + w * phi_ - s;
}

double PxDual::constraint_gap(double w) const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < z_.size(); ++i) {
    const double t = z_[i] / (pencil_.values[i] - w);
    s += t * t;
  }
  return s - phi_;
}

double PxDual::constraint_gap_derivative(double w) const {
  double s = 0.0;
  for (Eigen::Index i = 0; i < z_.size(); ++i) {
    const double d = pencil_.values[i] - w;
    s += 2.0 * z_[i] * z_[i] / (d * d * d);
  }
  return s;
}

Vector PxDual::primal(double w) const {
  Vector c(z_.size());
  for (Eigen::Index i = 0; i < z_.size(); ++i) c[i] = z_[i] / (pencil_.values[i] - w);
  const Vector lt_x = pencil_.whitened * c;
  return pencil_.chol_a.transpose().triangularView<Eigen::Upper>().solve(lt_x);
}

PxResult solve_px(const SymMatrix& M, const SymMatrix& A, double rho, const Vector& y,
                  double phi) {
  validate_px_inputs(M, A, rho, y, phi);
  const Matrix& a = A.matrix();
  PxResult out;

  // Unconstrained minimizer first; if it is volatile enough the multiplier is 0.
  const Vector x0 = solve_spd(shifted(M, rho), Vector(rho * y));
  if (x0.dot(a * x0) >= phi) {
    out.x = x0;
    out.lambda = 0.0;
    out.objective = penalty_objective(M, rho, x0, y);
    out.dual_value = rho * y.squaredNorm() - rho * y.dot(x0);
    out.gap = std::abs(out.objective - out.dual_value);
    return out;
  }

  const PxDual dual(M, A, rho, y, phi);
  const double w_bar = dual.w_bar();
  const double w_hi = w_bar * (1.0 - kBracketShrink);

  if (dual.constraint_gap(w_hi) < 0.0) {
    // Boundary unreachable before the pencil singularity: add a null-direction
    // component to reach x^T A x = phi.
    const double w_reg = w_bar - kHardCaseReg * w_bar;
    const Vector xr = dual.primal(w_reg);
    const Vector u = dual.pencil().eigenvector(0);
    const Vector au = a * u;
    const double qa = u.dot(au);
    const double qb = xr.dot(au);
    const double qc = xr.dot(a * xr) - phi;
    const double tau = (-qb + std::sqrt(std::max(0.0, qb * qb - qa * qc))) / qa;
    out.x = xr + tau * u;
    out.lambda = w_reg;
    out.hard_case = true;
    out.objective = penalty_objective(M, rho, out.x, y);
    out.dual_value = dual.value(w_reg);
    out.gap = std::abs(out.objective - out.dual_value);
    return out;
  }

  // Safeguarded Newton on psi(w) = 1/sqrt(x^T A x) - 1/sqrt(phi), which is
  // close to linear in w; bisection keeps the iterate inside [lo, hi].
  double lo = 0.0;
  double hi = w_hi;
  double w = 0.0;
  const double inv_sqrt_phi = 1.0 / std::sqrt(phi);
  bool converged = false;
  int it = 0;
  for (; it < kMaxRootIterations; ++it) {
    const double h = dual.constraint_gap(w);
    if (std::abs(h) <= kRootTol * phi) {
      converged = true;
      break;
    }
    if (h < 0.0)
      lo = w;
    else
      hi = w;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(hi))) {
      w = lo;
      converged = true;
      break;
    }
    const double s = h + phi;
    const double psi = 1.0 / std::sqrt(s) - inv_sqrt_phi;
    const double dpsi = -0.5 * dual.constraint_gap_derivative(w) / (s * std::sqrt(s));
    double next = w - psi / dpsi;
    if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
    w = next;
  }
  if (!converged)
    throw ConvergenceFailure(
        fmt::format("solve_px: no root of the volatility equation after {} iterations", it),
        dual.primal(lo));

  out.x = dual.primal(w);
  out.lambda = w;
  out.iterations = it;
  out.objective = penalty_objective(M, rho, out.x, y);
  out.dual_value = dual.value(w);
  out.gap = std::abs(out.objective - out.dual_value);
  return out;
}

IndexSet top_k_indices(const Vector& x, std::size_t k) {
  const auto n = static_cast<std::size_t>(x.size());
  if (k < 1 || k > n)
    throw Error(ErrorKind::InvalidInput, fmt::format("k={} outside [1, {}]", k, n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t i, std::size_t j) {
                      const double ai = std::abs(x[static_cast<Eigen::Index>(i)]);
                      const double aj = std::abs(x[static_cast<Eigen::Index>(j)]);
                      if (ai != aj) return ai > aj;
                      return i < j;
                    });
  order.resize(k);
  return IndexSet(std::move(order));
}

SparseProjection solve_py(const Vector& x, std::size_t k) {
  if (!x.allFinite()) throw Error(ErrorKind::InvalidInput, "solve_py: x has non-finite entries");
  if (x.isZero(0.0)) throw Error(ErrorKind::ZeroVector, "solve_py: x must be nonzero");
  SparseProjection out{Vector::Zero(x.size()), top_k_indices(x, k)};
  double norm2 = 0.0;
  for (std::size_t i : out.J) norm2 += x[static_cast<Eigen::Index>(i)] * x[static_cast<Eigen::Index>(i)];
  if (norm2 == 0.0) {
    out.y[static_cast<Eigen::Index>(out.J[0])] = 1.0;
    return out;
  }
  const double norm = std::sqrt(norm2);
  for (std::size_t i : out.J) {
    const auto e = static_cast<Eigen::Index>(i);
    out.y[e] = x[e] / norm;
  }
  return out;
}

}  // namespace mrp
