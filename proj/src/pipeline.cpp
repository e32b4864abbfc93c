#include "mrp/pipeline.hpp"

#include <cmath>

#include <fmt/core.h>

#include "mrp/errors.hpp"

namespace mrp {

void PipelineConfig::validate() const {
  estimation.validate();
  solver.pd.validate();
  if (k == 0) throw Error(ErrorKind::InvalidInput, "k must be at least 1");
  if (!(band_d > 0.0)) throw Error(ErrorKind::InvalidInput, "band width d must be positive");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error(ErrorKind::InvalidInput, "train fraction must lie in (0, 1)");
}

std::pair<PriceMatrix, PriceMatrix> split_prices(const PriceMatrix& p, double train_fraction) {
  const std::size_t T = p.T();
  const auto cut = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(T)));
  if (cut < 2 || T - cut < 2)
    throw Error(ErrorKind::InsufficientData,
                fmt::format("cannot split {} rows at fraction {}", T, train_fraction));
  return {p.slice(0, cut), p.slice(cut, T)};
}

PipelineResult run_pipeline(const PriceMatrix& p, const PipelineConfig& cfg) {
  cfg.validate();
  auto [train, test] = split_prices(p, cfg.train_fraction);
  Estimate est = build_instance(train, cfg.k, cfg.estimation);
  SolveReport rep = solve(est.instance, cfg.solver);
  BacktestReport bt = evaluate(test, rep.solution().x(), cfg.band_d);
  return {std::move(train), std::move(test), std::move(est), std::move(rep), std::move(bt)};
}

}  // namespace mrp
