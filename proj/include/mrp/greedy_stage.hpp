#pragma once

// Stage two: local search over supports. Each iteration enlarges the current
// support by s indices (augmentation) and then drops s of them again
// (contraction), solving every candidate restricted problem globally and
// keeping strict improvements only.

#include <cstddef>
#include <vector>

#include "mrp/model.hpp"
#include "mrp/restricted_qcqp.hpp"

namespace mrp {

struct GreedyConfig {
  std::size_t swap_size = 2;
  double decrease_tol = 1e-8;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct GreedyStep {
  IndexSet support;
  double value = 0.0;
};

struct GreedyTrace {
  std::vector<GreedyStep> steps;  // steps[0] is the starting support
  std::size_t swap_size = 0;      // effective s = min(s, N - k)
  std::size_t evaluated = 0;      // restricted problems solved
};

struct GreedyResult {
  PortfolioSolution solution;
  RestrictedSolution restricted;
  GreedyTrace trace;
};

/// All size-m subsets of `pool` in lexicographic order.
std::vector<IndexSet> combinations(const std::vector<std::size_t>& pool, std::size_t m);

/// Throws Infeasible when S0 cannot reach the volatility threshold and
/// InvalidIndexSet when |S0| != k.
GreedyResult greedy_improve(const ProblemInstance& inst, const IndexSet& S0,
                            const GreedyConfig& cfg = {});

}  // namespace mrp
