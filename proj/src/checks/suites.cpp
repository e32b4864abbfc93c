#include "mrp/checks/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include <fmt/core.h>

#include "mrp/backtest.hpp"
#include "mrp/checks/oracles.hpp"
#include "mrp/errors.hpp"
#include "mrp/pipeline.hpp"
#include "mrp/restricted_qcqp.hpp"
#include "mrp/solver.hpp"
#include "mrp/subproblems.hpp"
#include "mrp/synthetic.hpp"

namespace mrp::checks {

namespace {

using Clock = std::chrono::steady_clock;

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }

 private:
  Clock::time_point start_ = Clock::now();
};

std::size_t uniform_size(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Vector gaussian(Rng& rng, std::size_t n) {
  std::normal_distribution<double> nd;
  Vector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = nd(rng);
  return v;
}

void note_failure(SuiteResult& r, const std::string& what) {
  ++r.failures;
  if (r.detail.size() < 400) r.detail += (r.detail.empty() ? "" : "; ") + what;
}

}  // namespace

SuiteResult sparse_projection(const SuiteOptions& opt, std::size_t cases) {
  Timer timer;
  SuiteResult r;
  r.name = "sparse projection vs support enumeration";
  Rng rng(opt.seed + 1);
  const double tol = 1e-12 * opt.tolerance_scale;
  double worst = 0.0;
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t n = uniform_size(rng, 1, 10);
    const std::size_t k = uniform_size(rng, 1, n);
    Vector x = gaussian(rng, n) * uniform(rng, 0.1, 3.0);
    if (c % 10 == 0 && n > 1) x[1] = x[0];  // exercise ties
    ++r.cases;
    const SparseProjection p = solve_py(x, k);
    const double got = (p.y - x).squaredNorm();
    const double err = std::abs(got - oracle::sparse_projection_min(x, k));
    worst = std::max(worst, err);
    if (!(err <= tol)) note_failure(r, fmt::format("case {} error {:.3e}", c, err));
  }
  if (r.detail.empty()) r.detail = fmt::format("max |error| {:.2e}", worst);
  r.seconds = timer.seconds();
  return r;
}

SuiteResult x_block(const SuiteOptions& opt, std::size_t cases) {
  Timer timer;
  SuiteResult r;
  r.name = "x-block global optimality";
  Rng rng(opt.seed + 2);
  const double s = opt.tolerance_scale;
  double worst_gap = 0.0, worst_grid = 0.0;
  std::size_t hard = 0, planar = 0;
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t n = c % 4 == 0 ? 2 : uniform_size(rng, 2, 10);
    const Matrix M = random_spd(rng, n, std::pow(10.0, uniform(rng, 0.0, 4.0)));
    const Matrix A = random_spd(rng, n, std::pow(10.0, uniform(rng, 0.0, 4.0)));
    const double rho = std::pow(10.0, uniform(rng, -1.0, 2.0));
    const double phi = uniform(rng, 0.1, 3.0) * A.diagonal().maxCoeff();
    Vector y = gaussian(rng, n);
    y /= y.norm();
    if (c % 10 == 5) {
      // remove the component along the leading pencil direction
      const Vector u = pencil_eig(SymMatrix(Matrix(M + rho * Matrix::Identity(n, n))),
                                  SymMatrix(A)).eigenvector(0);
      y -= (u.dot(y) / u.squaredNorm()) * u;
    }
    ++r.cases;
    const PxResult px = solve_px(SymMatrix(M), SymMatrix(A), rho, y, phi);
    hard += px.hard_case;

    const double gap = std::abs(px.objective - px.dual_value) / (1.0 + std::abs(px.objective));
    worst_gap = std::max(worst_gap, gap);
    if (!(gap <= 1e-6 * s)) note_failure(r, fmt::format("case {} gap {:.3e}", c, gap));

    const double lmin = oracle::eigenvalues_by_bisection(A)[0];
    const double bound = std::max(std::sqrt(phi / lmin), y.norm()) + 1e-6 * s;
    if (!(px.x.norm() <= bound))
      note_failure(r, fmt::format("case {} norm {:.6g} above {:.6g}", c, px.x.norm(), bound));
    const double var = px.x.dot(A * px.x);
    if (!(var >= phi * (1.0 - 1e-8 * s)))
      note_failure(r, fmt::format("case {} variance {:.6g} below {:.6g}", c, var, phi));

    if (n == 2) {
      ++planar;
      const auto grid = oracle::polar_grid_px(M, A, rho, y, phi);
      const double diff = std::abs(px.objective - grid.value);
      worst_grid = std::max(worst_grid, diff);
      if (!(diff <= 1e-4 * s)) note_failure(r, fmt::format("case {} polar diff {:.3e}", c, diff));
    }
  }
  if (r.detail.empty())
    r.detail = fmt::format("max rel gap {:.2e}, max polar diff {:.2e} ({} planar, {} hard case)",
                           worst_gap, worst_grid, planar, hard);
  r.seconds = timer.seconds();
  return r;
}

SuiteResult restricted_qcqp(const SuiteOptions& opt, std::size_t cases) {
  Timer timer;
  SuiteResult r;
  r.name = "restricted QCQP vs sphere grid";
  Rng rng(opt.seed + 3);
  const double s = opt.tolerance_scale;
  double worst_excess = -1e300, worst_feas = 0.0, worst_gap = 0.0;
  std::size_t shortcut = 0;
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t n = 1 + c % 3;
    const Matrix Q0 = random_spd(rng, n, std::pow(10.0, uniform(rng, 0.0, 2.0)));
    const Matrix A = random_spd(rng, n, std::pow(10.0, uniform(rng, 0.0, 2.0)));
    const double lmax = oracle::eigenvalues_by_bisection(A)[static_cast<Eigen::Index>(n - 1)];
    const double phi = uniform(rng, 0.2, 0.98) * lmax;
    const Matrix Q1 = -A / phi;
    ++r.cases;
    const ReducedSolution sol = solve_reduced(make_reduced_pair(SymMatrix(Q0), SymMatrix(Q1)));
    shortcut += sol.eigen_shortcut;
    const Vector& u = sol.upsilon;

    const double feas = std::max({std::abs(u.norm() - 1.0), u.dot(Q1 * u) + 1.0, 0.0});
    worst_feas = std::max(worst_feas, feas);
    if (!(feas <= 1e-8 * s)) note_failure(r, fmt::format("case {} infeasible by {:.3e}", c, feas));

    const double gap = std::abs(sol.value - sol.cert.dual_value) / (1.0 + std::abs(sol.value));
    worst_gap = std::max(worst_gap, gap);
    if (!(gap <= 1e-6 * s)) note_failure(r, fmt::format("case {} gap {:.3e}", c, gap));

    const auto grid = oracle::sphere_grid_qcqp(Q0, Q1);
    if (grid) {
      const double excess = sol.value - grid->value;
      worst_excess = std::max(worst_excess, excess);
      if (!(excess <= 1e-3 * s))
        note_failure(r, fmt::format("case {} above grid by {:.3e}", c, excess));
    }
  }
  if (r.detail.empty())
    r.detail = fmt::format("max (value - grid) {:.2e}, max infeasibility {:.2e}, max rel gap {:.2e}, {} eigen shortcuts",
                           worst_excess, worst_feas, worst_gap, shortcut);
  r.seconds = timer.seconds();
  return r;
}

SuiteResult rank_reduction(const SuiteOptions& opt, std::size_t cases) {
  Timer timer;
  SuiteResult r;
  r.name = "rank reduction";
  Rng rng(opt.seed + 4);
  const double s = opt.tolerance_scale;
  double worst = 0.0;
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t n = uniform_size(rng, 2, 8);
    const std::size_t rank = uniform_size(rng, 1, std::min<std::size_t>(6, n));
    Matrix V(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(rank));
    for (Eigen::Index j = 0; j < V.cols(); ++j) V.col(j) = gaussian(rng, n);
    const Matrix Q1 = -random_spd(rng, n, 100.0);
    const PsdSolution Y = PsdSolution::from_factor(V);
    ++r.cases;
    const PsdSolution out = rank_reduce(Y, SymMatrix(Q1));
    const Matrix& y0 = Y.Y.matrix();
    const Matrix& y1 = out.Y.matrix();
    const double tr_err = std::abs(y1.trace() - y0.trace()) / std::max(1.0, y0.trace());
    const double q0 = (Q1 * y0).trace();
    const double q_err = std::abs((Q1 * y1).trace() - q0) / std::max(1.0, std::abs(q0));
    const Vector ev = oracle::eigenvalues_by_bisection(y1);
    const double second = ev.size() > 1 ? ev[ev.size() - 2] : 0.0;
    const bool rank_one = out.rank == 1 && out.factor.cols() == 1 &&
                          std::abs(second) <= 1e-9 * s * std::max(1.0, ev[ev.size() - 1]);
    worst = std::max({worst, tr_err, q_err});
    if (!rank_one) note_failure(r, fmt::format("case {} rank {} (second eigenvalue {:.3e})", c, out.rank, second));
    if (!(tr_err <= 1e-8 * s) || !(q_err <= 1e-8 * s))
      note_failure(r, fmt::format("case {} trace errors {:.3e} {:.3e}", c, tr_err, q_err));
  }
  if (r.detail.empty()) r.detail = fmt::format("max relative trace drift {:.2e}", worst);
  r.seconds = timer.seconds();
  return r;
}

std::vector<SuiteResult> penalty_decomposition(const SuiteOptions& opt, std::size_t cases) {
  Timer timer;
  SuiteResult mono;
  mono.name = "BCD monotonicity";
  SuiteResult stat;
  stat.name = "stage-one stationarity";
  Rng rng(opt.seed + 5);
  const double s = opt.tolerance_scale;
  double worst_rise = 0.0, worst_kkt = 0.0;
  std::size_t steps = 0;
  for (std::size_t c = 0; c < cases; ++c) {
    const ProblemInstance inst = random_instance(rng, 8, 3);
    const PdResult pd = pd_solve(inst, PdConfig{});
    ++mono.cases;
    bool rose = false;
    for (const auto& h : pd.diagnostics.q_histories)
      for (std::size_t i = 1; i < h.size(); ++i) {
        ++steps;
        const double rise = (h[i] - h[i - 1]) / (1.0 + std::abs(h[i - 1]));
        worst_rise = std::max(worst_rise, rise);
        if (!(rise <= 1e-10 * s)) rose = true;
      }
    if (rose) note_failure(mono, fmt::format("case {} q increased", c));

    ++stat.cases;
    const double kkt = pd.diagnostics.kkt_residual;
    worst_kkt = std::max(worst_kkt, kkt);
    if (!(kkt <= 1e-4 * s)) note_failure(stat, fmt::format("case {} kkt {:.3e}", c, kkt));
    try {
      PortfolioSolution::make(inst, pd.x_star, pd.L);
    } catch (const Error& e) {
      note_failure(stat, fmt::format("case {}: {}", c, e.what()));
    }
    if (!(pd.diagnostics.max_x_norm <= pd.diagnostics.x_norm_bound + 1e-6 * s))
      note_failure(stat, fmt::format("case {} iterate norm {:.6g} above {:.6g}", c,
                                     pd.diagnostics.max_x_norm, pd.diagnostics.x_norm_bound));
  }
  if (mono.detail.empty())
    mono.detail = fmt::format("{} inner steps, max relative rise {:.2e}", steps, worst_rise);
  if (stat.detail.empty()) stat.detail = fmt::format("max kkt residual {:.2e}", worst_kkt);
  mono.seconds = stat.seconds = timer.seconds();
  return {mono, stat};
}

SuiteResult greedy_quality(const SuiteOptions& opt, std::size_t cases) {
  Timer timer;
  SuiteResult r;
  r.name = "greedy vs exhaustive optimum";
  const double s = opt.tolerance_scale;
  double worst_ratio = 0.0;
  std::size_t exact = 0;
  SolverConfig cfg;
  cfg.greedy.threads = opt.threads;
  for (std::size_t c = 0; c < cases; ++c) {
    const ProblemInstance inst = build_instance(market_prices(opt.seed + 200 + c), 4).instance;
    ++r.cases;
    const SolveReport rep = solve(inst, cfg);
    const auto best = oracle::exhaustive_support(inst);
    const double fin = rep.final_objective();
    const double ratio = fin / best.value - 1.0;
    worst_ratio = std::max(worst_ratio, ratio);
    exact += rep.solution().support() == best.support;
    if (!(ratio <= 0.05 * s)) note_failure(r, fmt::format("case {} {:.2f}% above optimum", c, 100 * ratio));
    if (!(fin <= rep.stage_one_objective() + 1e-12))
      note_failure(r, fmt::format("case {} greedy worsened stage one", c));
    const auto& st = rep.stage_two.trace.steps;
    for (std::size_t i = 1; i < st.size(); ++i)
      if (!(st[i].value < st[i - 1].value - 1e-8)) {
        note_failure(r, fmt::format("case {} trace not strictly decreasing", c));
        break;
      }
  }
  if (r.detail.empty())
    r.detail = fmt::format("max excess {:.3f}%, optimum support found in {}/{}", 100 * worst_ratio,
                           exact, cases);
  r.seconds = timer.seconds();
  return r;
}

SuiteResult planted_recovery(const SuiteOptions& opt, std::size_t cases) {
  Timer timer;
  SuiteResult r;
  r.name = "planted triple recovery";
  r.allowed_failures = cases - (cases * 4 + 4) / 5;  // at least 80% recovered
  if (opt.tolerance_scale < 1.0) r.allowed_failures = 0;
  PipelineConfig cfg;
  cfg.k = 3;
  cfg.solver.greedy.threads = opt.threads;
  std::size_t hits = 0;
  for (std::size_t c = 0; c < cases; ++c) {
    const PlantedData d = planted_prices(opt.seed + 100 + c);
    ++r.cases;
    const PipelineResult res = run_pipeline(d.prices, cfg);
    const IndexSet& S = res.solve.solution().support();
    const bool found = std::all_of(d.planted.begin(), d.planted.end(),
                                   [&](std::size_t i) { return S.contains(i); });
    if (found)
      ++hits;
    else
      note_failure(r, fmt::format("seed {} missed", opt.seed + 100 + c));
  }
  r.detail = fmt::format("{}/{} recovered", hits, cases) + (r.detail.empty() ? "" : "; " + r.detail);
  r.seconds = timer.seconds();
  return r;
}

SuiteResult backtest_fixture(const SuiteOptions&) {
  Timer timer;
  SuiteResult r;
  r.name = "backtest arithmetic";

  // y = e1, log prices (0, 1, 2), long from t = 0, closed at t = 2
  PriceMatrix p;
  p.tickers = {"A"};
  p.dates = {"2020-01-01", "2020-01-02", "2020-01-03"};
  p.prices.resize(3, 1);
  p.prices << 1.0, std::exp(1.0), std::exp(2.0);
  Vector y(1);
  y << 1.0;
  const Vector spread = compute_spread(p, y);
  TradeLog log;
  log.events = {{0, TradeAction::OpenLong, spread[0]}, {2, TradeAction::Close, spread[2]}};
  const Vector pnl = compute_pnl(spread, log);
  ++r.cases;
  if (!(pnl.size() == 2 && pnl[0] == 1.0 && pnl[1] == 1.0 && pnl.sum() == 2.0))
    note_failure(r, "long fixture P&L differs from (1, 1)");

  Vector roi(2);
  roi << 0.01, 0.03;
  const SharpeRatio sr = sharpe(roi);
  ++r.cases;
  if (!(sr.value == 2.0 && sr.mean == 0.02 && sr.sd == 0.01 && sr.defined))
    note_failure(r, fmt::format("Sharpe {:.17g}, expected 2", sr.value));

  Vector s3(3);
  s3 << 0.0, 2.0, 0.0;
  const TradeLog t3 = run_strategy(s3, 1.0);
  ++r.cases;
  const bool short_ok = t3.events.size() == 2 && t3.events[0].t == 1 &&
                        t3.events[0].action == TradeAction::OpenShort && t3.events[1].t == 2 &&
                        t3.events[1].action == TradeAction::Close;
  if (!short_ok) note_failure(r, "band rule on (0, 2, 0) did not short at 1 and close at 2");

  const BacktestReport rep = evaluate(p, y, 1.0);
  double cum = 0.0;
  for (Eigen::Index i = 0; i < rep.pnl.size(); ++i) cum += rep.pnl[i];
  ++r.cases;
  if (!(rep.cum_pnl == cum) || !(rep.roi == rep.pnl / 1.0))
    note_failure(r, "report totals inconsistent with the per-step series");

  if (r.detail.empty()) r.detail = "P&L (1, 1), cum 2, Sharpe 2";
  r.seconds = timer.seconds();
  return r;
}

std::vector<SuiteResult> run_all(const SuiteOptions& opt) {
  std::vector<SuiteResult> out;
  out.push_back(sparse_projection(opt));
  out.push_back(x_block(opt));
  out.push_back(restricted_qcqp(opt));
  out.push_back(rank_reduction(opt));
  for (auto& s : penalty_decomposition(opt)) out.push_back(std::move(s));
  out.push_back(greedy_quality(opt));
  out.push_back(planted_recovery(opt));
  out.push_back(backtest_fixture(opt));
  return out;
}

}  // namespace mrp::checks
