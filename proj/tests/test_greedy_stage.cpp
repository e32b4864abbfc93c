#include <cmath>

#include "helpers.hpp"
#include "mrp/checks/oracles.hpp"
#include "mrp/greedy_stage.hpp"
#include "mrp/pd_stage.hpp"
#include "mrp/solver.hpp"

using namespace mrp;

namespace {

std::size_t binomial(std::size_t n, std::size_t k) {
  std::size_t c = 1;
  for (std::size_t i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

}  // namespace

TEST_CASE("combinations in lexicographic order") {
  const auto c = combinations({1, 3, 5, 7}, 2);
  REQUIRE(c.size() == 6);
  CHECK(c.front() == IndexSet{1, 3});
  CHECK(c[1] == IndexSet{1, 5});
  CHECK(c.back() == IndexSet{5, 7});
  for (std::size_t k = 1; k <= 5; ++k)
    for (std::size_t s = 0; s <= 3; ++s) {
      std::vector<std::size_t> pool(k + s);
      for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
      CHECK(combinations(pool, k).size() == binomial(k + s, k));
    }
  CHECK(combinations({0, 1}, 0).size() == 1);
}

TEST_CASE("full support leaves nothing to swap") {
  Rng rng(5);
  const ProblemInstance inst = random_instance(rng, 4, 4);
  const GreedyResult r = greedy_improve(inst, IndexSet::range(4));
  CHECK(r.trace.steps.size() == 1);
  CHECK(r.trace.swap_size == 0);
  CHECK(r.solution.support() == IndexSet::range(4));
}

TEST_CASE("starting at the optimum changes nothing") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const ProblemInstance inst = random_instance(rng, 7, 3);
    const oracle::SupportOptimum best = oracle::exhaustive_support(inst);
    const GreedyResult r = greedy_improve(inst, best.support);
    CHECK(r.trace.steps.size() == 1);
    CHECK(r.solution.support() == best.support);
    CHECK(r.solution.objective() == doctest::Approx(best.value).epsilon(1e-9));
  }
}

TEST_CASE("planted block is found from a disjoint start") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const ProblemInstance inst = planted_block_instance(rng, 8, 3);
    const GreedyResult r = greedy_improve(inst, IndexSet{5, 6, 7});
    CHECK(r.solution.support() == IndexSet{0, 1, 2});
    const oracle::SupportOptimum best = oracle::exhaustive_support(inst);
    CHECK(std::abs(r.solution.objective() - best.value) <= 1e-6);
  }
}

TEST_CASE("trace values strictly decrease") {
  for (std::uint64_t seed = 30; seed < 40; ++seed) {
    Rng rng(seed);
    const ProblemInstance inst = random_instance(rng, 9, 3);
    const GreedyResult r = greedy_improve(inst, find_feasible_support(inst));
    for (std::size_t i = 1; i < r.trace.steps.size(); ++i)
      CHECK(r.trace.steps[i].value < r.trace.steps[i - 1].value - 1e-8);
    CHECK(r.solution.objective() == doctest::Approx(r.trace.steps.back().value).epsilon(1e-9));
  }
}

TEST_CASE("thread count does not change the result") {
  Rng rng(77);
  const ProblemInstance inst = random_instance(rng, 10, 4);
  GreedyConfig one;
  one.threads = 1;
  GreedyConfig four;
  four.threads = 4;
  const GreedyResult a = greedy_improve(inst, IndexSet{0, 1, 2, 3}, one);
  const GreedyResult b = greedy_improve(inst, IndexSet{0, 1, 2, 3}, four);
  CHECK(a.solution.support() == b.solution.support());
  CHECK(a.solution.x() == b.solution.x());
  CHECK(a.trace.evaluated == b.trace.evaluated);
}

TEST_CASE("greedy input validation") {
  const ProblemInstance inst(SymMatrix::identity(4), test::diag({2, 2, 0.5, 0.5}), 1.0, 2);
  CHECK_ERROR_KIND(greedy_improve(inst, IndexSet{2, 3}), ErrorKind::Infeasible);
  CHECK_ERROR_KIND(greedy_improve(inst, IndexSet{0}), ErrorKind::InvalidIndexSet);
}

TEST_CASE("two-stage solve never worsens stage one") {
  for (std::uint64_t seed = 200; seed < 210; ++seed) {
    Rng rng(seed);
    const ProblemInstance inst = random_instance(rng, 8, 3);
    const SolveReport rep = solve(inst);
    CHECK(rep.final_objective() <= rep.stage_one_objective() + 1e-12);
    CHECK(rep.solution().variance() >= inst.phi() * (1.0 - 1e-8));
    CHECK(rep.solution().support().size() == 3);
    CHECK(rep.stage_two.trace.steps.front().support == rep.stage_one.L);
  }
}
