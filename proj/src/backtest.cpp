#include "mrp/backtest.hpp"

#include <cmath>

#include <fmt/core.h>

#include "mrp/errors.hpp"

namespace mrp {

const char* to_string(TradeAction a) noexcept {
  switch (a) {
    case TradeAction::OpenLong: return "open_long";
    case TradeAction::OpenShort: return "open_short";
    case TradeAction::Close: return "close";
  }
  return "unknown";
}

Vector compute_spread(const PriceMatrix& p, const Vector& y) {
  if (static_cast<std::size_t>(y.size()) != p.N())
    throw Error(ErrorKind::InvalidInput,
                fmt::format("portfolio has {} weights for {} assets", y.size(), p.N()));
  if ((p.prices.array() <= 0.0).any() || !p.prices.allFinite())
    throw Error(ErrorKind::InvalidPrice, "prices must be finite and positive");
  return p.prices.array().log().matrix() * y;
}

TradeLog run_strategy(const Vector& spread, double d) {
  if (spread.size() < 2) throw Error(ErrorKind::InvalidInput, "spread needs at least 2 points");
  if (!(d > 0.0)) throw Error(ErrorKind::InvalidInput, "band width d must be positive");
  TradeLog log;
  const double n = static_cast<double>(spread.size());
  log.mean = spread.sum() / n;
  log.sd = std::sqrt((spread.array() - log.mean).square().sum() / n);
  if (!(log.sd > 0.0)) throw Error(ErrorKind::NoVolatility, "spread is constant");

  const double upper = log.mean + d * log.sd;
  const double lower = log.mean - d * log.sd;
  const Eigen::Index last = spread.size() - 1;
  int pos = 0;  // +1 long, -1 short
  for (Eigen::Index t = 0; t <= last; ++t) {
    const double s = spread[t];
    const auto ut = static_cast<std::size_t>(t);
    if (pos == 0) {
      if (t == last) break;
      if (s >= upper) {
        log.events.push_back({ut, TradeAction::OpenShort, s});
        pos = -1;
      } else if (s <= lower) {
        log.events.push_back({ut, TradeAction::OpenLong, s});
        pos = 1;
      }
    } else if (t == last || (pos == 1 && s >= log.mean) || (pos == -1 && s <= log.mean)) {
      log.events.push_back({ut, TradeAction::Close, s});
      pos = 0;
    }
  }
  return log;
}

Vector compute_pnl(const Vector& spread, const TradeLog& trades) {
  const Eigen::Index T = spread.size();
  Vector pnl = Vector::Zero(std::max<Eigen::Index>(T - 1, 0));
  std::size_t next = 0;
  int pos = 0;
  // pos after processing the events at index t - 1 earns the move to t
  for (Eigen::Index t = 1; t < T; ++t) {
    while (next < trades.events.size() &&
           trades.events[next].t == static_cast<std::size_t>(t - 1)) {
      switch (trades.events[next].action) {
        case TradeAction::OpenLong: pos = 1; break;
        case TradeAction::OpenShort: pos = -1; break;
        case TradeAction::Close: pos = 0; break;
      }
      ++next;
    }
    const double move = spread[t] - spread[t - 1];
    pnl[t - 1] = pos == 1 ? move : (pos == -1 ? -move : 0.0);
  }
  return pnl;
}

SharpeRatio sharpe(const Vector& roi) {
  SharpeRatio r;
  if (roi.size() == 0) return r;
  const double n = static_cast<double>(roi.size());
  r.mean = roi.sum() / n;
  r.sd = std::sqrt((roi.array() - r.mean).square().sum() / n);
  if (r.sd > 0.0) {
    r.value = r.mean / r.sd;
    r.defined = true;
  }
  return r;
}

namespace {

bool same(const Vector& a, const Vector& b) { return a.size() == b.size() && a == b; }

}  // namespace

bool operator==(const BacktestReport& a, const BacktestReport& b) {
  return same(a.spread, b.spread) && same(a.pnl, b.pnl) && same(a.roi, b.roi) &&
         a.cum_pnl == b.cum_pnl && a.sharpe == b.sharpe && a.sharpe_defined == b.sharpe_defined &&
         a.mean_roi == b.mean_roi && a.sd_roi == b.sd_roi &&
         a.gross_exposure == b.gross_exposure && a.band_d == b.band_d && a.trades == b.trades;
}

BacktestReport evaluate(const PriceMatrix& p, const Vector& y, double d) {
  BacktestReport rep;
  rep.band_d = d;
  rep.spread = compute_spread(p, y);
  rep.trades = run_strategy(rep.spread, d);
  rep.pnl = compute_pnl(rep.spread, rep.trades);
  rep.gross_exposure = y.lpNorm<1>();
  if (!(rep.gross_exposure > 0.0))
    throw Error(ErrorKind::InvalidInput, "portfolio has zero gross exposure");
  rep.roi = rep.pnl / rep.gross_exposure;
  double cum = 0.0;
  for (Eigen::Index t = 0; t < rep.pnl.size(); ++t) cum += rep.pnl[t];
  rep.cum_pnl = cum;
  const SharpeRatio sr = sharpe(rep.roi);
  rep.sharpe = sr.value;
  rep.sharpe_defined = sr.defined;
  rep.mean_roi = sr.mean;
  rep.sd_roi = sr.sd;
  return rep;
}

}  // namespace mrp
