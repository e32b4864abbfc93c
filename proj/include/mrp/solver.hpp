#pragma once

// Two-stage solver: penalty decomposition followed by greedy support search.

#include <optional>

#include "mrp/greedy_stage.hpp"
#include "mrp/pd_stage.hpp"

namespace mrp {

struct SolverConfig {
  PdConfig pd;
  GreedyConfig greedy;
  std::optional<Vector> y00;
};

struct SolveReport {
  PdResult stage_one;
  GreedyResult stage_two;

  const PortfolioSolution& solution() const noexcept { return stage_two.solution; }
  double stage_one_objective() const noexcept { return stage_one.objective; }
  double final_objective() const noexcept { return stage_two.solution.objective(); }
};

SolveReport solve(const ProblemInstance& inst, const SolverConfig& cfg = {});

}  // namespace mrp
