#include "mrp/solver.hpp"

namespace mrp {

SolveReport solve(const ProblemInstance& inst, const SolverConfig& cfg) {
  PdResult one = pd_solve(inst, cfg.pd, cfg.y00);
  GreedyResult two = greedy_improve(inst, one.L, cfg.greedy);
  return {std::move(one), std::move(two)};
}

}  // namespace mrp
