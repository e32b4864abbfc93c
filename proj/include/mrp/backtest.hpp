#pragma once

// Band trading on the log-price spread of a portfolio and its P&L metrics.

#include <cstddef>
#include <vector>

#include "mrp/estimation.hpp"
#include "mrp/numerics.hpp"

namespace mrp {

enum class TradeAction { OpenLong, OpenShort, Close };

const char* to_string(TradeAction a) noexcept;

struct TradeEvent {
  std::size_t t = 0;
  TradeAction action = TradeAction::Close;
  double spread_value = 0.0;

  friend bool operator==(const TradeEvent&, const TradeEvent&) = default;
};

/// Opens and closes alternate; the last event is a close when any position
/// was opened.
struct TradeLog {
  std::vector<TradeEvent> events;
  double mean = 0.0;  // band centre
  double sd = 0.0;    // population standard deviation of the spread

  friend bool operator==(const TradeLog&, const TradeLog&) = default;
};

/// spread_t = y^T log(p_t). Throws InvalidPrice on a nonpositive price.
Vector compute_spread(const PriceMatrix& p, const Vector& y);

/// Opens short at spread >= mean + d sd, long at spread <= mean - d sd, closes
/// when the spread crosses the mean, and force-closes at the final index.
/// Throws NoVolatility when sd = 0.
TradeLog run_strategy(const Vector& spread, double d);

/// Per-step P&L for t = 1..T-1: +/-(spread_t - spread_{t-1}) while a long /
/// short position opened before t is held, 0 when flat.
Vector compute_pnl(const Vector& spread, const TradeLog& trades);

struct SharpeRatio {
  double mean = 0.0;
  double sd = 0.0;
  double value = 0.0;
  bool defined = false;  // false for empty or constant series (value 0)
};

/// Mean over population standard deviation.
SharpeRatio sharpe(const Vector& roi);

struct BacktestReport {
  Vector spread;
  Vector pnl;
  Vector roi;
  double cum_pnl = 0.0;
  double sharpe = 0.0;
  bool sharpe_defined = false;
  double mean_roi = 0.0;
  double sd_roi = 0.0;
  double gross_exposure = 0.0;  // ||y||_1
  double band_d = 0.0;
  TradeLog trades;
};

/// Exact field-by-field equality.
bool operator==(const BacktestReport& a, const BacktestReport& b);

BacktestReport evaluate(const PriceMatrix& p, const Vector& y, double d);

}  // namespace mrp
