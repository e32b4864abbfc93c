#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "mrp/estimation.hpp"

using namespace mrp;
using test::vec;

namespace {

PriceMatrix parse(const std::string& text) {
  std::istringstream in(text);
  return parse_prices(in, "test.csv");
}

PriceMatrix from_log(const Matrix& s) {
  PriceMatrix p;
  for (Eigen::Index j = 0; j < s.cols(); ++j) p.tickers.push_back("T" + std::to_string(j));
  for (Eigen::Index t = 0; t < s.rows(); ++t) p.dates.push_back("d" + std::to_string(t));
  p.prices = s.array().exp().matrix();
  return p;
}

}  // namespace

TEST_CASE("well-formed price file") {
  const PriceMatrix p = parse("date,AAA,BBB\n2024-01-02,10,20\n2024-01-03,11,21.5\n2024-01-04,12,19\n");
  CHECK(p.T() == 3);
  CHECK(p.N() == 2);
  CHECK(p.tickers == std::vector<std::string>{"AAA", "BBB"});
  CHECK(p.prices(1, 1) == 21.5);
  CHECK(p.dropped_rows == 0);
}

TEST_CASE("blank cell drops its row") {
  const PriceMatrix p = parse("date,A,B\n2024-01-02,1,2\n2024-01-03,,2\n2024-01-04,1.5,2.5\n");
  CHECK(p.T() == 2);
  CHECK(p.dropped_rows == 1);
  CHECK(p.dates == std::vector<std::string>{"2024-01-02", "2024-01-04"});
}

TEST_CASE("dates come out ascending") {
  const PriceMatrix p = parse("date,A\n2024-03-01,3\n2024-01-01,1\n2024-02-01,2\n");
  CHECK(p.dates == std::vector<std::string>{"2024-01-01", "2024-02-01", "2024-03-01"});
  CHECK(p.prices(0, 0) == 1.0);
  CHECK(p.prices(2, 0) == 3.0);
}

TEST_CASE("malformed price files") {
  CHECK_ERROR_KIND(parse("date,A\n2024-01-01,1\n2024-01-02,abc\n"), ErrorKind::IngestError);
  CHECK_ERROR_KIND(parse("date,A\n2024-01-01,1\n2024-01-02,-1\n"), ErrorKind::IngestError);
  CHECK_ERROR_KIND(parse("date,A\nnot-a-date,1\n2024-01-02,2\n"), ErrorKind::IngestError);
  CHECK_ERROR_KIND(parse("date,A\n2024-01-01,1\n2024-01-01,2\n"), ErrorKind::IngestError);
  CHECK_ERROR_KIND(parse("date,A,B\n2024-01-01,1\n2024-01-02,2,3\n"), ErrorKind::IngestError);
  CHECK_ERROR_KIND(parse("date,A\n2024-01-01,1\n"), ErrorKind::InsufficientData);
  try {
    parse("date,A,B\n2024-01-01,1,2\n2024-01-02,3,x7\n");
    FAIL("expected an ingest error");
  } catch (const Error& e) {
    const std::string what = e.what();
    CHECK(what.find("row 3") != std::string::npos);
    CHECK(what.find("column 3") != std::string::npos);
  }
}

TEST_CASE("volatility threshold is a fifth of the median variance") {
  CHECK(volatility_threshold(vec({1, 2, 3}), 1.0) == doctest::Approx(0.4));
  CHECK(volatility_threshold(vec({3, 1, 2}), 2.0) == doctest::Approx(0.8));
  CHECK(volatility_threshold(vec({1, 2, 3, 4}), 1.0) == doctest::Approx(0.5));
}

TEST_CASE("noiseless scalar autoregression") {
  Matrix s(30, 1);
  s(0, 0) = 1.0;
  for (Eigen::Index t = 1; t < s.rows(); ++t) s(t, 0) = 0.5 * s(t - 1, 0);
  const Matrix b = fit_var1(s, 0.0);
  CHECK(std::abs(b(0, 0) - 0.5) <= 1e-10);
}

TEST_CASE("noiseless diagonal autoregression") {
  Matrix s(40, 2);
  s.row(0) << 1.0, 2.0;
  for (Eigen::Index t = 1; t < s.rows(); ++t) {
    s(t, 0) = 0.5 * s(t - 1, 0) + 0.1;
    s(t, 1) = -0.3 * s(t - 1, 1) - 0.2;
  }
  const Matrix b = fit_var1(s, 0.0);
  CHECK(std::abs(b(0, 0) - 0.5) <= 1e-10);
  CHECK(std::abs(b(1, 1) + 0.3) <= 1e-10);
  CHECK(std::abs(b(0, 1)) <= 1e-10);
  CHECK(std::abs(b(1, 0)) <= 1e-10);
}

TEST_CASE("sample covariance uses the T - 1 divisor") {
  Matrix s(3, 1);
  s << 1, 2, 3;
  CHECK(sample_covariance(s)(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("flat prices cannot be estimated") {
  PriceMatrix p;
  p.tickers = {"A", "B"};
  p.dates = {"1", "2", "3", "4", "5"};
  p.prices = Matrix::Constant(5, 2, 7.0);
  CHECK_ERROR_KIND(build_instance(p, 1), ErrorKind::EstimationError);
}

TEST_CASE("too few rows for the regression") {
  Rng rng(1);
  Matrix s(4, 3);
  for (Eigen::Index i = 0; i < s.size(); ++i) s.data()[i] = std::normal_distribution<double>(0, 0.1)(rng);
  CHECK_ERROR_KIND(build_instance(from_log(s), 2), ErrorKind::InsufficientData);
}

TEST_CASE("estimated instance is symmetric positive definite") {
  const PriceMatrix p = market_prices(9);
  const Estimate e = build_instance(p, 4);
  CHECK(e.instance.N() == p.N());
  CHECK(e.instance.k() == 4);
  CHECK((e.instance.M().matrix() - e.instance.M().matrix().transpose()).norm() == 0.0);
  CHECK(eig_sym(e.instance.M()).values[0] > 0.0);
  CHECK(eig_sym(e.instance.A()).values[0] > 0.0);
  Vector var = e.gamma.diagonal();
  CHECK(e.instance.phi() == doctest::Approx(volatility_threshold(var, 1.0)));
  const Matrix m = e.B.transpose() * e.gamma * e.B;
  const double ridge = 1e-8 * e.gamma.trace() / static_cast<double>(p.N());
  CHECK((e.instance.M().matrix() - m - ridge * Matrix::Identity(m.rows(), m.cols())).norm() <=
        1e-12 * m.norm());
}

TEST_CASE("uniform price rescaling leaves the instance unchanged") {
  const PriceMatrix p = market_prices(4);
  PriceMatrix q = p;
  q.prices *= 37.5;
  const Estimate a = build_instance(p, 3);
  const Estimate b = build_instance(q, 3);
  const auto rel = [](const Matrix& x, const Matrix& y) { return (x - y).norm() / x.norm(); };
  CHECK(rel(a.instance.M().matrix(), b.instance.M().matrix()) <= 1e-12);
  CHECK(rel(a.instance.A().matrix(), b.instance.A().matrix()) <= 1e-12);
  CHECK(std::abs(a.instance.phi() - b.instance.phi()) <= 1e-12 * a.instance.phi());
}
