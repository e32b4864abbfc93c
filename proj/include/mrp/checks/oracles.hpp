#pragma once

// Independent brute-force references used by the self-check suites and the
// tests. None of them call into the solver kernels they are compared with.

#include <cstddef>
#include <cstdint>
#include <optional>

#include "mrp/model.hpp"
#include "mrp/numerics.hpp"

namespace mrp::oracle {

/// Number of eigenvalues of the symmetric matrix a below sigma, from the
/// inertia of a - sigma I (pivoted LDL^T).
std::size_t count_below(const Matrix& a, double sigma);

/// All eigenvalues, ascending, by bisection on count_below.
Vector eigenvalues_by_bisection(const Matrix& a, double tol = 1e-12);

/// Smallest root of det(p - mu a) = 0 for an SPD pair, by a sign scan on the
/// determinant followed by bisection.
double pencil_min_by_determinant(const Matrix& p, const Matrix& a, double tol = 1e-12);

/// min ||y - x||^2 over unit y with ||y||_0 <= k, enumerating every support J
/// of size k through ||x||^2 + 1 - 2 ||x_J||.
double sparse_projection_min(const Vector& x, std::size_t k);

struct GridResult {
  double value = 0.0;
  Vector point;
};

/// Two-dimensional x-block by polar brute force: for each angle the radius is
/// optimal in closed form, the angle is scanned and then refined by golden
/// section around the best cell.
GridResult polar_grid_px(const Matrix& M, const Matrix& A, double rho, const Vector& y,
                         double phi, std::size_t angles = 20000);

/// min u^T Q0 u over unit u with u^T Q1 u <= -1 for order 1, 2 or 3 by a
/// spherical-coordinate grid; nullopt when no grid point is feasible.
std::optional<GridResult> sphere_grid_qcqp(const Matrix& Q0, const Matrix& Q1,
                                           std::size_t resolution = 600);

/// max over unit u of u^T A u >= phi, sampled on a sphere grid (order <= 3).
bool sphere_grid_feasible(const Matrix& A, double phi, std::size_t resolution = 600);

/// max of u^T A u over `samples` uniformly random unit vectors.
double sampled_rayleigh_max(const Matrix& A, std::size_t samples, std::uint64_t seed);

struct SupportOptimum {
  IndexSet support;
  double value = 0.0;
  std::size_t evaluated = 0;
};

/// Global optimum by solving the restricted problem on all C(N, k) supports.
SupportOptimum exhaustive_support(const ProblemInstance& inst);

}  // namespace mrp::oracle
