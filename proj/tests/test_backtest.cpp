#include <cmath>

#include "helpers.hpp"
#include "mrp/backtest.hpp"
#include "mrp/io.hpp"

using namespace mrp;
using test::vec;

namespace {

PriceMatrix prices(const Matrix& values) {
  PriceMatrix p;
  for (Eigen::Index j = 0; j < values.cols(); ++j) p.tickers.push_back("T" + std::to_string(j));
  for (Eigen::Index t = 0; t < values.rows(); ++t) p.dates.push_back("2024-01-0" + std::to_string(t + 1));
  p.prices = values;
  return p;
}

const double e = std::exp(1.0);

}  // namespace

TEST_CASE("spread of log prices") {
  Matrix v(3, 2);
  v << 1, 5, e, 5, e * e, 5;
  const Vector s = compute_spread(prices(v), vec({1, 0}));
  CHECK(s[0] == doctest::Approx(0.0));
  CHECK(s[1] == doctest::Approx(1.0));
  CHECK(s[2] == doctest::Approx(2.0));
  CHECK(compute_spread(prices(v), vec({0, 0})).isZero(0.0));

  Matrix same(3, 2);
  same << 2, 2, 3, 3, 4, 4;
  CHECK(compute_spread(prices(same), vec({1, -1})).isZero(0.0));

  Matrix bad = v;
  bad(1, 1) = 0.0;
  CHECK_ERROR_KIND(compute_spread(prices(bad), vec({1, 0})), ErrorKind::InvalidPrice);
}

TEST_CASE("spread inside the band produces no trades") {
  const TradeLog log = run_strategy(vec({0, 1, 2}), 2.0);
  CHECK(log.events.empty());
  CHECK(log.mean == doctest::Approx(1.0));
  CHECK(log.sd == doctest::Approx(std::sqrt(2.0 / 3.0)));
}

TEST_CASE("three-step short round trip") {
  const TradeLog log = run_strategy(vec({0, 2, 0}), 1.0);
  REQUIRE(log.events.size() == 2);
  CHECK(log.events[0] == TradeEvent{1, TradeAction::OpenShort, 2.0});
  CHECK(log.events[1] == TradeEvent{2, TradeAction::Close, 0.0});
  const Vector pnl = compute_pnl(vec({0, 2, 0}), log);
  REQUIRE(pnl.size() == 2);
  CHECK(pnl[0] == 0.0);
  CHECK(pnl[1] == 2.0);
}

TEST_CASE("constant spread has no volatility") {
  CHECK_ERROR_KIND(run_strategy(vec({1.5, 1.5, 1.5}), 1.0), ErrorKind::NoVolatility);
}

TEST_CASE("opens and closes alternate and end flat") {
  Rng rng(8);
  for (int c = 0; c < 20; ++c) {
    const Vector s = test::random_vector(rng, 60);
    const TradeLog log = run_strategy(s, 0.5);
    for (std::size_t i = 0; i < log.events.size(); ++i) {
      const bool is_close = log.events[i].action == TradeAction::Close;
      CHECK(is_close == (i % 2 == 1));
      if (i > 0) CHECK(log.events[i].t > log.events[i - 1].t);
    }
    if (!log.events.empty()) CHECK(log.events.back().action == TradeAction::Close);
  }
}

TEST_CASE("long position held over two steps") {
  const TradeLog log{{{0, TradeAction::OpenLong, 0.0}, {2, TradeAction::Close, 2.0}}, 1.0, 1.0};
  const Vector pnl = compute_pnl(vec({0, 1, 2}), log);
  CHECK(pnl[0] == 1.0);
  CHECK(pnl[1] == 1.0);
}

TEST_CASE("sharpe ratio") {
  const SharpeRatio s = sharpe(vec({0.01, 0.03}));
  CHECK(s.defined);
  CHECK(s.mean == doctest::Approx(0.02));
  CHECK(s.sd == doctest::Approx(0.01));
  CHECK(s.value == doctest::Approx(2.0));
  const SharpeRatio flat = sharpe(vec({0, 0, 0}));
  CHECK_FALSE(flat.defined);
  CHECK(flat.value == 0.0);
}

TEST_CASE("flat backtest reports zero") {
  Matrix v(3, 1);
  v << 1, e, e * e;
  const BacktestReport r = evaluate(prices(v), vec({1}), 5.0);
  CHECK(r.trades.events.empty());
  CHECK(r.cum_pnl == 0.0);
  CHECK(r.sharpe == 0.0);
  CHECK_FALSE(r.sharpe_defined);
}

TEST_CASE("report invariants on random data") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PriceMatrix p = market_prices(seed);
    Rng rng(seed);
    const Vector y = test::random_vector(rng, p.N());
    const BacktestReport r = evaluate(p, y, 1.0);
    double cum = 0.0;
    for (Eigen::Index t = 0; t < r.pnl.size(); ++t) cum += r.pnl[t];
    CHECK(r.cum_pnl == cum);
    CHECK(r.gross_exposure == y.lpNorm<1>());
    for (Eigen::Index t = 0; t < r.pnl.size(); ++t) CHECK(r.roi[t] == r.pnl[t] / y.lpNorm<1>());

    const BacktestReport neg = evaluate(p, -y, 1.0);
    CHECK(neg.pnl == r.pnl);
    REQUIRE(neg.trades.events.size() == r.trades.events.size());
    for (std::size_t i = 0; i < r.trades.events.size(); ++i) {
      const TradeAction a = r.trades.events[i].action;
      const TradeAction b = neg.trades.events[i].action;
      CHECK(neg.trades.events[i].t == r.trades.events[i].t);
      if (a == TradeAction::Close) CHECK(b == TradeAction::Close);
      if (a == TradeAction::OpenLong) CHECK(b == TradeAction::OpenShort);
      if (a == TradeAction::OpenShort) CHECK(b == TradeAction::OpenLong);
    }

    const BacktestReport back = report_from_json(Json::parse(report_to_json(r, p.dates).dump()));
    CHECK(back == r);
  }
}

TEST_CASE("zero weights give a flat spread") {
  Matrix v(3, 1);
  v << 1, 2, 3;
  CHECK_ERROR_KIND(evaluate(prices(v), vec({0}), 1.0), ErrorKind::NoVolatility);
}
