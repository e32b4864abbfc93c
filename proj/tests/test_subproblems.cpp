#include <cmath>

#include "helpers.hpp"
#include "mrp/checks/oracles.hpp"
#include "mrp/subproblems.hpp"

using namespace mrp;
using test::diag;
using test::vec;

namespace {

void check_stationary(const Matrix& M, const Matrix& A, double rho, const Vector& y,
                      const PxResult& r) {
  const Vector g = M * r.x + rho * (r.x - y) - r.lambda * A * r.x;
  CHECK(g.norm() <= 1e-7 * (1.0 + M.norm() + rho + r.lambda * A.norm()) * (1.0 + r.x.norm()));
  CHECK(r.lambda >= 0.0);
}

}  // namespace

TEST_CASE("x-block with the unconstrained minimizer on the boundary") {
  const SymMatrix I2 = SymMatrix::identity(2);
  const PxResult r = solve_px(I2, I2, 1.0, vec({2, 0}), 1.0);
  CHECK(r.x[0] == doctest::Approx(1.0));
  CHECK(r.x[1] == doctest::Approx(0.0));
  CHECK(r.lambda == doctest::Approx(0.0));
  CHECK(r.objective == doctest::Approx(2.0));
}

TEST_CASE("x-block with an active constraint") {
  const SymMatrix I2 = SymMatrix::identity(2);
  const PxResult r = solve_px(I2, I2, 1.0, vec({2, 0}), 4.0);
  CHECK(r.x[0] == doctest::Approx(2.0));
  CHECK(std::abs(r.x[1]) <= 1e-12);
  CHECK(r.lambda == doctest::Approx(1.0));
  CHECK(r.objective == doctest::Approx(4.0));
  CHECK(r.gap <= 1e-9);
}

TEST_CASE("x-block hard case") {
  // y has no component along e1, the pencil's leading direction
  const PxResult r = solve_px(diag({1, 3}), SymMatrix::identity(2), 1.0, vec({0, 1}), 1.0);
  CHECK(r.hard_case);
  CHECK(r.x[0] == doctest::Approx(std::sqrt(0.75)).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(r.lambda == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(r.objective == doctest::Approx(2.5).epsilon(1e-6));
  CHECK(r.gap <= 1e-6 * (1.0 + r.objective));
}

TEST_CASE("x-block agrees with the polar grid in two dimensions") {
  const Matrix M = diag({1, 4}).matrix();
  const Matrix A = diag({4, 1}).matrix();
  const Vector y = vec({1, 1});
  const PxResult r = solve_px(SymMatrix(M), SymMatrix(A), 2.0, y, 4.0);
  const auto grid = oracle::polar_grid_px(M, A, 2.0, y, 4.0);
  CHECK(std::abs(r.objective - grid.value) <= 1e-4);
  check_stationary(M, A, 2.0, y, r);
}

TEST_CASE("x-block certificate on random instances") {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 9);
    const Matrix M = random_spd(rng, n, 1e4);
    const Matrix A = random_spd(rng, n, 1e4);
    const double rho = 0.5 + trial % 7;
    const double phi = (0.2 + 0.3 * (trial % 5)) * A.diagonal().maxCoeff();
    const Vector y = test::random_vector(rng, n).normalized();
    const PxResult r = solve_px(SymMatrix(M), SymMatrix(A), rho, y, phi);
    CHECK(r.x.dot(A * r.x) >= phi * (1.0 - 1e-8));
    CHECK(r.gap <= 1e-6 * (1.0 + std::abs(r.objective)));
    const double lmin = oracle::eigenvalues_by_bisection(A)[0];
    CHECK(r.x.norm() <= std::max(std::sqrt(phi / lmin), y.norm()) + 1e-6);
    CHECK(r.objective == doctest::Approx(penalty_objective(SymMatrix(M), rho, r.x, y)));
    check_stationary(M, A, rho, y, r);
    if (r.lambda > 0.0) CHECK(std::abs(r.x.dot(A * r.x) - phi) <= 1e-8 * phi);
  }
}

TEST_CASE("x-block dual is concave and its gap derivative matches") {
  Rng rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix M = random_spd(rng, 5, 100.0);
    const Matrix A = random_spd(rng, 5, 100.0);
    const Vector y = test::random_vector(rng, 5).normalized();
    const double phi = A.diagonal().maxCoeff();
    const PxDual g(SymMatrix(M), SymMatrix(A), 1.5, y, phi);
    const double wb = g.w_bar();
    const double h = wb * 1e-3;
    for (int i = 1; i < 900; i += 7) {
      const double w = wb * i / 1000.0;
      const double second = g.value(w - h) - 2.0 * g.value(w) + g.value(w + h);
      CHECK(second <= 1e-6 * (1.0 + std::abs(g.value(w))));
      const double fd = (g.value(w + 1e-7 * wb) - g.value(w - 1e-7 * wb)) / (2e-7 * wb);
      CHECK(-fd == doctest::Approx(g.constraint_gap(w)).epsilon(1e-4).scale(phi));
    }
  }
}

TEST_CASE("x-block input validation") {
  const SymMatrix I2 = SymMatrix::identity(2);
  CHECK_ERROR_KIND(solve_px(I2, I2, 0.0, vec({1, 0}), 1.0), ErrorKind::InvalidInput);
  CHECK_ERROR_KIND(solve_px(I2, I2, 1.0, vec({NAN, 0}), 1.0), ErrorKind::InvalidInput);
  CHECK_ERROR_KIND(solve_px(I2, I2, 1.0, vec({1, 0, 0}), 1.0), ErrorKind::InvalidInput);
  CHECK_ERROR_KIND(solve_px(I2, I2, 1.0, vec({1, 0}), -1.0), ErrorKind::InvalidInput);
}

TEST_CASE("sparse projection closed form") {
  const SparseProjection a = solve_py(vec({3, 0, 4}), 1);
  CHECK(a.y == vec({0, 0, 1}));
  CHECK(a.J == IndexSet{2});

  const SparseProjection b = solve_py(vec({3, 0, 4}), 2);
  CHECK(b.y[0] == doctest::Approx(0.6));
  CHECK(b.y[1] == 0.0);
  CHECK(b.y[2] == doctest::Approx(0.8));
  CHECK(b.J == IndexSet{0, 2});

  const SparseProjection c = solve_py(vec({1, -1, 0}), 1);
  CHECK(c.y == vec({1, 0, 0}));
  CHECK(c.J == IndexSet{0});

  CHECK(top_k_indices(vec({2, -2, 2, 1}), 2) == IndexSet{0, 1});
  CHECK_ERROR_KIND(solve_py(vec({0, 0}), 1), ErrorKind::ZeroVector);
}

TEST_CASE("sparse projection is optimal over every support") {
  Rng rng(33);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 10);
    const Vector x = test::random_vector(rng, n);
    for (std::size_t k = 1; k <= n; ++k) {
      const SparseProjection p = solve_py(x, k);
      const double obj = (p.y - x).squaredNorm();
      CHECK(std::abs(p.y.norm() - 1.0) <= 1e-12);
      CHECK(static_cast<std::size_t>((p.y.array() != 0.0).count()) <= k);
      CHECK(std::abs(obj - oracle::sparse_projection_min(x, k)) <= 1e-12);
      double xj = 0.0;
      for (std::size_t i : p.J) xj += x[static_cast<Eigen::Index>(i)] * x[static_cast<Eigen::Index>(i)];
      CHECK(std::abs(obj - (x.squaredNorm() + 1.0 - 2.0 * std::sqrt(xj))) <= 1e-12);
    }
  }
}
