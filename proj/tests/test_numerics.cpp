#include <cmath>

#include "helpers.hpp"
#include "mrp/checks/oracles.hpp"

using namespace mrp;
using test::diag;
using test::vec;

TEST_CASE("SymMatrix symmetrizes exactly") {
  Matrix e(2, 2);
  e << 1.0, 0.1, 0.3, 2.0;
  const SymMatrix s(e);
  CHECK(s(0, 1) == s(1, 0));
  CHECK(s(0, 1) == doctest::Approx(0.2));
  CHECK_ERROR_KIND(SymMatrix(Matrix(2, 3)), ErrorKind::InvalidMatrix);
  CHECK_ERROR_KIND(SymMatrix(Matrix(0, 0)), ErrorKind::InvalidMatrix);
}

TEST_CASE("eig_sym on identity and diagonal input") {
  const auto id = eig_sym(SymMatrix::identity(3));
  for (int i = 0; i < 3; ++i) CHECK(id.values[i] == doctest::Approx(1.0));

  const auto d = eig_sym(diag({3, 1, 2}));
  CHECK(d.values[0] == doctest::Approx(1.0));
  CHECK(d.values[1] == doctest::Approx(2.0));
  CHECK(d.values[2] == doctest::Approx(3.0));
  CHECK(d.vectors(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("eig_sym matches the inertia-bisection oracle") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = test::random_symmetric(rng, 6);
    const auto eig = eig_sym(SymMatrix(a));
    const Vector ref = oracle::eigenvalues_by_bisection(a);
    for (int i = 0; i < 6; ++i) CHECK(std::abs(eig.values[i] - ref[i]) <= 1e-8);
  }
}

TEST_CASE("eig_sym decomposition invariants") {
  Rng rng(12);
  for (std::size_t n = 1; n <= 12; ++n) {
    const Matrix a = test::random_symmetric(rng, n);
    const auto eig = eig_sym(SymMatrix(a));
    const Matrix& v = eig.vectors;
    const auto m = static_cast<Eigen::Index>(n);
    const double amax = a.cwiseAbs().maxCoeff();
    CHECK((v.transpose() * v - Matrix::Identity(m, m)).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((v * eig.values.asDiagonal() * v.transpose() - a).cwiseAbs().maxCoeff() <=
          1e-8 * (1.0 + amax));
    CHECK(std::abs(a.trace() - eig.values.sum()) <= 1e-8 * static_cast<double>(n) * (1.0 + amax));
    for (Eigen::Index i = 1; i < m; ++i) CHECK(eig.values[i - 1] <= eig.values[i]);
  }
}

TEST_CASE("eigenvectors carry the sign rule") {
  Rng rng(13);
  const auto eig = eig_sym(SymMatrix(test::random_symmetric(rng, 5)));
  for (Eigen::Index j = 0; j < 5; ++j) {
    Eigen::Index i = 0;
    while (std::abs(eig.vectors(i, j)) <= 1e-12) ++i;
    CHECK(eig.vectors(i, j) > 0.0);
  }
}

TEST_CASE("solve_spd small cases") {
  const Vector a = solve_spd(SymMatrix::identity(2), vec({3, 4}));
  CHECK(a[0] == doctest::Approx(3.0));
  CHECK(a[1] == doctest::Approx(4.0));
  const Vector b = solve_spd(diag({2, 4}), vec({2, 4}));
  CHECK(b[0] == doctest::Approx(1.0));
  CHECK(b[1] == doctest::Approx(1.0));
  CHECK_ERROR_KIND(solve_spd(diag({1, -1}), vec({1, 1})), ErrorKind::NotPositiveDefinite);
  CHECK_ERROR_KIND(solve_spd(diag({1, 1}), vec({1, 1, 1})), ErrorKind::InvalidInput);
}

TEST_CASE("solve_spd residual on random SPD systems") {
  Rng rng(14);
  std::uniform_int_distribution<std::size_t> order(1, 20);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = order(rng);
    const auto m = static_cast<Eigen::Index>(n);
    Matrix g(m, m);
    for (Eigen::Index j = 0; j < m; ++j) g.col(j) = test::random_vector(rng, n);
    const Matrix s = g.transpose() * g + Matrix::Identity(m, m);
    const Vector b = test::random_vector(rng, n);
    const Vector x = solve_spd(SymMatrix(s), b);
    CHECK((s * x - b).norm() <= 1e-10 * (s.norm() * x.norm() + b.norm()));
  }
}

TEST_CASE("cholesky_lower reproduces the input") {
  Rng rng(15);
  const Matrix s = random_spd(rng, 6, 50.0);
  const Matrix l = cholesky_lower(SymMatrix(s));
  CHECK((l * l.transpose() - s).cwiseAbs().maxCoeff() <= 1e-12 * s.cwiseAbs().maxCoeff() * 10);
  CHECK(l.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pencil_min_eig small cases") {
  CHECK(pencil_min_eig(SymMatrix(2.0 * Matrix::Identity(3, 3)), SymMatrix::identity(3)) ==
        doctest::Approx(2.0));
  CHECK(pencil_min_eig(diag({1, 8}), diag({1, 2})) == doctest::Approx(1.0));
  CHECK_ERROR_KIND(pencil_min_eig(diag({1, 1}), diag({1, -1})), ErrorKind::NotPositiveDefinite);
}

TEST_CASE("pencil_min_eig matches the determinant-bisection oracle") {
  Rng rng(16);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix p = random_spd(rng, 5, 100.0);
    const Matrix a = random_spd(rng, 5, 100.0);
    const double got = pencil_min_eig(SymMatrix(p), SymMatrix(a));
    CHECK(std::abs(got - oracle::pencil_min_by_determinant(p, a)) <= 1e-8 * std::max(1.0, got));
  }
}

TEST_CASE("pencil with identity metric equals the ordinary spectrum") {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix p = random_spd(rng, 7, 1e3);
    CHECK(std::abs(pencil_min_eig(SymMatrix(p), SymMatrix::identity(7)) -
                   eig_sym(SymMatrix(p)).values[0]) <= 1e-9);
  }
}

TEST_CASE("pencil eigenvectors solve the generalized problem") {
  Rng rng(18);
  const Matrix p = random_spd(rng, 5, 100.0);
  const Matrix a = random_spd(rng, 5, 100.0);
  const auto pen = pencil_eig(SymMatrix(p), SymMatrix(a));
  for (std::size_t j = 0; j < 5; ++j) {
    const Vector v = pen.eigenvector(j);
    CHECK(v.norm() == doctest::Approx(1.0));
    CHECK((p * v - pen.values[static_cast<Eigen::Index>(j)] * a * v).norm() <= 1e-9 * p.norm());
  }
}

TEST_CASE("principal_submatrix and normalize_sign") {
  Matrix m(3, 3);
  m << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  const Matrix s = principal_submatrix(m, {0, 2});
  CHECK(s(0, 0) == 1);
  CHECK(s(0, 1) == 3);
  CHECK(s(1, 0) == 7);
  CHECK(s(1, 1) == 9);

  Vector v = vec({0.0, -1e-13, -2.0, 1.0});
  normalize_sign(v);
  CHECK(v[2] == 2.0);
  CHECK(v[3] == -1.0);
}
