#pragma once

// Estimate on a training window, solve, and backtest on the remaining rows.

#include <cstddef>

#include "mrp/backtest.hpp"
#include "mrp/estimation.hpp"
#include "mrp/solver.hpp"

namespace mrp {

struct PipelineConfig {
  std::size_t k = 4;
  EstimationConfig estimation;
  SolverConfig solver;
  double band_d = 1.0;
  double train_fraction = 0.7;

  void validate() const;
};

struct PipelineResult {
  PriceMatrix train;
  PriceMatrix test;
  Estimate estimate;
  SolveReport solve;
  BacktestReport backtest;
};

/// Splits p at floor(train_fraction * T); the test window needs at least 2 rows.
std::pair<PriceMatrix, PriceMatrix> split_prices(const PriceMatrix& p, double train_fraction);

PipelineResult run_pipeline(const PriceMatrix& p, const PipelineConfig& cfg);

}  // namespace mrp
