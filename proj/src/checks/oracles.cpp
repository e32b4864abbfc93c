#include "mrp/checks/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "mrp/errors.hpp"
#include "mrp/greedy_stage.hpp"
#include "mrp/restricted_qcqp.hpp"

namespace mrp::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double gershgorin_radius(const Matrix& a) {
  double r = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) r = std::max(r, a.row(i).cwiseAbs().sum());
  return r;
}

// Unit vectors on a latitude/longitude grid of the sphere in R^n, n <= 3.
template <class Fn>
void for_each_sphere_point(Eigen::Index n, std::size_t res, Fn fn) {
  const double pi = std::numbers::pi;
  if (n == 1) {
    Vector u(1);
    u << 1.0;
    fn(u);
    return;
  }
  if (n == 2) {
    for (std::size_t i = 0; i < 4 * res; ++i) {
      const double t = pi * static_cast<double>(i) / (2.0 * static_cast<double>(res));
      Vector u(2);
      u << std::cos(t), std::sin(t);
      fn(u);
    }
    return;
  }
  // u and -u give equal values, so the upper hemisphere suffices.
  for (std::size_t i = 0; i <= res; ++i) {
    const double th = 0.5 * pi * static_cast<double>(i) / static_cast<double>(res);
    const std::size_t m = std::max<std::size_t>(1, static_cast<std::size_t>(
                                                       std::ceil(4.0 * res * std::sin(th))));
    for (std::size_t j = 0; j < m; ++j) {
      const double ph = 2.0 * pi * static_cast<double>(j) / static_cast<double>(m);
      Vector u(3);
      u << std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th);
      fn(u);
    }
  }
}

}  // namespace

std::size_t count_below(const Matrix& a, double sigma) {
  Matrix s = a;
  s.diagonal().array() -= sigma;
  Eigen::LDLT<Matrix> ldlt(s);
  return static_cast<std::size_t>((ldlt.vectorD().array() < 0.0).count());
}

Vector eigenvalues_by_bisection(const Matrix& a, double tol) {
  const Eigen::Index n = a.rows();
  const double r = gershgorin_radius(a) + 1.0;
  Vector out(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    // smallest sigma with count_below(sigma) > j
    double lo = -r, hi = r;
    while (hi - lo > tol * std::max(1.0, std::abs(lo) + std::abs(hi))) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (count_below(a, mid) > static_cast<std::size_t>(j))
        hi = mid;
      else
        lo = mid;
    }
    out[j] = 0.5 * (lo + hi);
  }
  return out;
}

double pencil_min_by_determinant(const Matrix& p, const Matrix& a, double tol) {
  auto det = [&](double mu) { return Eigen::PartialPivLU<Matrix>(p - mu * a).determinant(); };
  // Rayleigh quotients on coordinate vectors bound the smallest root above.
  double hi = kInf;
  for (Eigen::Index i = 0; i < p.rows(); ++i) hi = std::min(hi, p(i, i) / a(i, i));
  const double d0 = det(0.0);
  const std::size_t steps = 4000;
  double lo = 0.0;
  double found = hi;
  for (std::size_t s = 1; s <= steps; ++s) {
    const double mu = hi * static_cast<double>(s) / static_cast<double>(steps);
    if (std::signbit(det(mu)) != std::signbit(d0) || det(mu) == 0.0) {
      found = mu;
      break;
    }
    lo = mu;
  }
  double h = found;
  while (h - lo > tol * std::max(1.0, h)) {
    const double mid = 0.5 * (lo + h);
    if (mid <= lo || mid >= h) break;
    if (std::signbit(det(mid)) != std::signbit(d0) || det(mid) == 0.0)
      h = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + h);
}

double sparse_projection_min(const Vector& x, std::size_t k) {
  const std::size_t n = static_cast<std::size_t>(x.size());
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  double best = kInf;
  const double x2 = x.squaredNorm();
  for (const IndexSet& J : combinations(all, std::min(k, n))) {
    double s = 0.0;
    for (std::size_t i : J) s += x[static_cast<Eigen::Index>(i)] * x[static_cast<Eigen::Index>(i)];
    best = std::min(best, x2 + 1.0 - 2.0 * std::sqrt(s));
  }
  return best;
}

GridResult polar_grid_px(const Matrix& M, const Matrix& A, double rho, const Vector& y,
                         double phi, std::size_t angles) {
  const double pi = std::numbers::pi;
  const double y2 = y.squaredNorm();
  auto at = [&](double t, Vector* point) {
    Vector u(2);
    u << std::cos(t), std::sin(t);
    const double m = u.dot(M * u), a = u.dot(A * u), c = u.dot(y);
    const double r = std::max(rho * c / (m + rho), std::sqrt(phi / a));
    if (point) *point = r * u;
    return r * r * (m + rho) - 2.0 * rho * r * c + rho * y2;
  };
  double best = kInf;
  double best_t = 0.0;
  const double step = 2.0 * pi / static_cast<double>(angles);
  for (std::size_t i = 0; i < angles; ++i) {
    const double t = step * static_cast<double>(i);
    const double v = at(t, nullptr);
    if (v < best) {
      best = v;
      best_t = t;
    }
  }
  double lo = best_t - step, hi = best_t + step;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
    if (at(c, nullptr) < at(d, nullptr))
      hi = d;
    else
      lo = c;
  }
  GridResult r;
  const double t = 0.5 * (lo + hi);
  r.value = at(t, &r.point);
  if (best < r.value) r.value = at(best_t, &r.point);
  return r;
}

std::optional<GridResult> sphere_grid_qcqp(const Matrix& Q0, const Matrix& Q1,
                                           std::size_t resolution) {
  std::optional<GridResult> out;
  for_each_sphere_point(Q0.rows(), resolution, [&](const Vector& u) {
    if (u.dot(Q1 * u) > -1.0) return;
    const double v = u.dot(Q0 * u);
    if (!out || v < out->value) out = GridResult{v, u};
  });
  return out;
}

bool sphere_grid_feasible(const Matrix& A, double phi, std::size_t resolution) {
  bool ok = false;
  for_each_sphere_point(A.rows(), resolution, [&](const Vector& u) {
    if (u.dot(A * u) >= phi) ok = true;
  });
  return ok;
}

double sampled_rayleigh_max(const Matrix& A, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  double best = -kInf;
  Vector u(A.rows());
  for (std::size_t s = 0; s < samples; ++s) {
    for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = nd(rng);
    u.normalize();
    best = std::max(best, u.dot(A * u));
  }
  return best;
}

SupportOptimum exhaustive_support(const ProblemInstance& inst) {
  std::vector<std::size_t> all(inst.N());
  for (std::size_t i = 0; i < inst.N(); ++i) all[i] = i;
  SupportOptimum best;
  best.value = kInf;
  for (const IndexSet& s : combinations(all, inst.k())) {
    ++best.evaluated;
    if (!support_feasible(inst, s)) continue;
    const RestrictedSolution r = solve_restricted(inst, s);
    if (r.value < best.value) {
      best.value = r.value;
      best.support = s;
    }
  }
  if (best.support.empty()) throw Error(ErrorKind::Infeasible, "no feasible support");
  return best;
}

}  // namespace mrp::oracle
