#include "mrp/greedy_stage.hpp"

#include <limits>
#include <optional>

#include <fmt/core.h>

#include "mrp/errors.hpp"
#include "mrp/parallel.hpp"

namespace mrp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Candidate {
  double value = kInf;
  std::optional<RestrictedSolution> sol;
};

Candidate evaluate(const ProblemInstance& inst, const IndexSet& idx) {
  if (!support_feasible(inst, idx)) return {};
  try {
    RestrictedSolution s = solve_restricted(inst, idx);
    return {s.value, std::move(s)};
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Infeasible) return {};
    throw;
  }
}

// Smallest value, ties to the earliest index (candidates are in lex order).
std::size_t argmin(const std::vector<Candidate>& c) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < c.size(); ++i)
    if (c[i].value < c[best].value) best = i;
  return best;
}

}  // namespace

std::vector<IndexSet> combinations(const std::vector<std::size_t>& pool, std::size_t m) {
  std::vector<IndexSet> out;
  const std::size_t n = pool.size();
  if (m > n) return out;
  std::vector<std::size_t> c(m);
  for (std::size_t i = 0; i < m; ++i) c[i] = i;
  while (true) {
    std::vector<std::size_t> v(m);
    for (std::size_t i = 0; i < m; ++i) v[i] = pool[c[i]];
    out.emplace_back(std::move(v));
    std::size_t i = m;
    while (i > 0 && c[i - 1] == n - m + i - 1) --i;
    if (i == 0) break;
    ++c[i - 1];
    for (std::size_t j = i; j < m; ++j) c[j] = c[j - 1] + 1;
  }
  return out;
}

GreedyResult greedy_improve(const ProblemInstance& inst, const IndexSet& S0,
                            const GreedyConfig& cfg) {
  const std::size_t n = inst.N();
  const std::size_t k = inst.k();
  if (S0.size() != k || (k > 0 && S0[k - 1] >= n))
    throw Error(ErrorKind::InvalidIndexSet,
                fmt::format("starting support must hold {} indices below {}", k, n));
  if (cfg.swap_size < 1) throw Error(ErrorKind::InvalidInput, "swap size must be at least 1");
  if (!(cfg.decrease_tol >= 0.0))
    throw Error(ErrorKind::InvalidInput, "decrease tolerance must be non-negative");

  GreedyTrace trace;
  trace.swap_size = std::min(cfg.swap_size, n - k);

  Candidate cur = evaluate(inst, S0);
  ++trace.evaluated;
  if (!cur.sol) throw Error(ErrorKind::Infeasible, "starting support is infeasible");
  IndexSet S = S0;
  trace.steps.push_back({S, cur.value});

  while (trace.swap_size > 0) {
    const std::vector<IndexSet> adds = combinations(S.complement(n).values(), trace.swap_size);
    const auto aug = parallel_map<Candidate>(adds.size(), cfg.threads, [&](std::size_t i) {
      return evaluate(inst, S.united(adds[i]));
    });
    trace.evaluated += adds.size();
    const IndexSet T = S.united(adds[argmin(aug)]);

    const std::vector<IndexSet> subs = combinations(T.values(), k);
    const auto con = parallel_map<Candidate>(subs.size(), cfg.threads, [&](std::size_t i) {
      return evaluate(inst, subs[i]);
    });
    trace.evaluated += subs.size();
    const std::size_t b = argmin(con);
    if (!(con[b].value < cur.value - cfg.decrease_tol)) break;
    S = subs[b];
    cur = con[b];
    trace.steps.push_back({S, cur.value});
  }

  RestrictedSolution r = std::move(*cur.sol);
  PortfolioSolution sol = PortfolioSolution::make(inst, r.x, r.support);
  return {std::move(sol), std::move(r), std::move(trace)};
}

}  // namespace mrp
