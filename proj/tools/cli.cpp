#include "cli.hpp"

#include <filesystem>
#include <string>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "mrp/checks/suites.hpp"
#include "mrp/errors.hpp"
#include "mrp/io.hpp"
#include "mrp/pipeline.hpp"
#include "mrp/synthetic.hpp"

namespace mrp::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  fs::path prices;
  fs::path instance;
  fs::path solution;
  fs::path out = ".";
  std::size_t k = 4;
  bool k_given = false;
  std::uint64_t seed = 1;
  bool inject_failure = false;
  std::string synth_kind = "planted";
  std::size_t synth_assets = 0;
  std::size_t synth_periods = 500;
  PipelineConfig pipeline;
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Infeasible:
    case ErrorKind::DualUnbounded: return kInfeasible;
    case ErrorKind::IngestError:
    case ErrorKind::InsufficientData:
    case ErrorKind::InvalidPrice: return kIngest;
    case ErrorKind::EstimationError: return kEstimation;
    case ErrorKind::ConvergenceFailure: return kConvergence;
    case ErrorKind::NoVolatility: return kNoVolatility;
    default: return kFailure;
  }
}

void add_estimation_flags(CLI::App* app, Options& o) {
  auto& e = o.pipeline.estimation;
  app->add_option("--phi-multiplier", e.phi_multiplier, "Scale of the volatility threshold")
      ->capture_default_str();
  app->add_option("--ridge-b", e.ridge_B, "VAR(1) ridge (relative to tr(X'X)/N)")
      ->capture_default_str();
  app->add_option("--ridge-m", e.ridge_M, "Ridge on M (relative to tr(Gamma)/N)")
      ->capture_default_str();
  app->add_option("--ridge-a", e.ridge_A, "Ridge on A (relative to tr(Gamma)/N)")
      ->capture_default_str();
}

void add_solver_flags(CLI::App* app, Options& o) {
  auto& s = o.pipeline.solver;
  app->add_option("--rho0", s.pd.rho0, "Initial penalty")->capture_default_str();
  app->add_option("--rho-growth", s.pd.growth, "Penalty growth factor")->capture_default_str();
  app->add_option("--inner-tol", s.pd.inner_tol, "Inner stopping tolerance")->capture_default_str();
  app->add_option("--outer-tol", s.pd.outer_tol, "Outer stopping tolerance")->capture_default_str();
  app->add_option("--max-inner", s.pd.max_inner, "Inner iteration limit")->capture_default_str();
  app->add_option("--max-outer", s.pd.max_outer, "Outer iteration limit")->capture_default_str();
  app->add_option("--swap-size", s.greedy.swap_size, "Greedy swap size")->capture_default_str();
  app->add_option("--decrease-tol", s.greedy.decrease_tol, "Greedy acceptance threshold")
      ->capture_default_str();
  app->add_option("--threads", s.greedy.threads, "Worker threads (0 = all cores)")
      ->capture_default_str();
}

void add_k(CLI::App* app, Options& o) {
  app->add_option_function<std::size_t>(
         "--k",
         [&o](const std::size_t& v) {
           o.k = v;
           o.k_given = true;
         },
         "Cardinality budget")
      ->check(CLI::PositiveNumber);
}

void add_band(CLI::App* app, Options& o) {
  app->add_option("--band-d", o.pipeline.band_d, "Band width in spread standard deviations")
      ->capture_default_str();
}

void add_out(CLI::App* app, Options& o) {
  app->add_option("--out", o.out, "Output directory")->capture_default_str();
}

int cmd_estimate(const Options& o, std::ostream& out) {
  o.pipeline.estimation.validate();
  const PriceMatrix p = load_prices(o.prices);
  const Estimate est = build_instance(p, o.k, o.pipeline.estimation);
  write_json(o.out / "instance.json", instance_to_json(est.instance, est.tickers));
  out << fmt::format("estimated N={} T={} (dropped {} rows) phi={} -> {}\n", p.N(), p.T(),
                     p.dropped_rows, format_double(est.instance.phi()),
                     (o.out / "instance.json").string());
  return kOk;
}

void print_solution(const SolveReport& rep, const std::vector<std::string>& tickers,
                    std::ostream& out) {
  std::string names;
  for (std::size_t i : rep.solution().support()) names += (names.empty() ? "" : " ") + tickers[i];
  out << fmt::format("support [{}] objective {} (stage one {}) kkt {:.2e} gap {:.2e}\n", names,
                     format_double(rep.final_objective()),
                     format_double(rep.stage_one_objective()), rep.solution().kkt_residual(),
                     rep.stage_two.restricted.cert.gap);
}

int cmd_solve(const Options& o, std::ostream& out) {
  o.pipeline.solver.pd.validate();
  InstanceFile f = instance_from_json(read_json(o.instance));
  if (o.k_given)
    f.instance = ProblemInstance(f.instance.M(), f.instance.A(), f.instance.phi(), o.k);
  const SolveReport rep = solve(f.instance, o.pipeline.solver);
  write_json(o.out / "solution.json", solution_to_json(rep, f.tickers));
  print_solution(rep, f.tickers, out);
  return kOk;
}

void write_backtest(const BacktestReport& rep, const PriceMatrix& p, const fs::path& dir,
                    std::ostream& out) {
  write_json(dir / "report.json", report_to_json(rep, p.dates));
  write_text(dir / "spread.csv", series_csv(rep, p.dates));
  out << fmt::format("trades {} cum_pnl {} sharpe {}{}\n", rep.trades.events.size(),
                     format_double(rep.cum_pnl), format_double(rep.sharpe),
                     rep.sharpe_defined ? "" : " (undefined)");
}

int cmd_backtest(const Options& o, std::ostream& out) {
  const PriceMatrix p = load_prices(o.prices);
  const Vector y = weights_from_solution(read_json(o.solution));
  write_backtest(evaluate(p, y, o.pipeline.band_d), p, o.out, out);
  return kOk;
}

int cmd_pipeline(const Options& o, std::ostream& out) {
  PipelineConfig cfg = o.pipeline;
  cfg.k = o.k;
  cfg.validate();
  const PriceMatrix p = load_prices(o.prices);
  // estimation artifacts are written before the solve so a failing solve
  // still leaves the instance on disk
  auto [train, test] = split_prices(p, cfg.train_fraction);
  const Estimate est = build_instance(train, cfg.k, cfg.estimation);
  write_json(o.out / "instance.json", instance_to_json(est.instance, est.tickers));
  const SolveReport rep = solve(est.instance, cfg.solver);
  write_json(o.out / "solution.json", solution_to_json(rep, est.tickers));
  print_solution(rep, est.tickers, out);
  write_backtest(evaluate(test, rep.solution().x(), cfg.band_d), test, o.out, out);
  return kOk;
}

int cmd_selfcheck(const Options& o, std::ostream& out) {
  checks::SuiteOptions opt;
  opt.threads = o.pipeline.solver.greedy.threads;
  if (o.inject_failure) opt.tolerance_scale = 1e-30;
  std::size_t failed = 0;
  double total = 0.0;
  for (const auto& s : checks::run_all(opt)) {
    failed += !s.passed();
    total += s.seconds;
    out << fmt::format("[{}] {}: {}/{} ok ({:.2f}s) {}\n", s.passed() ? "PASS" : "FAIL", s.name,
                       s.cases - s.failures, s.cases, s.seconds, s.detail);
  }
  out << fmt::format("{} suites failed, {:.1f}s total\n", failed, total);
  return failed == 0 ? kOk : kFailure;
}

int cmd_synth(const Options& o, std::ostream& out) {
  fs::create_directories(o.out);
  if (o.synth_kind == "planted") {
    PlantedConfig cfg;
    if (o.synth_assets > 0) cfg.assets = o.synth_assets;
    cfg.periods = o.synth_periods;
    const PlantedData d = planted_prices(o.seed, cfg);
    write_text(o.out / "prices.csv", prices_csv(d.prices));
    Json j;
    j["planted"] = d.planted.values();
    write_json(o.out / "planted.json", j);
    out << fmt::format("wrote {} x {} planted prices, planted assets {} {} {}\n", d.prices.T(),
                       d.prices.N(), d.prices.tickers[d.planted[0]], d.prices.tickers[d.planted[1]],
                       d.prices.tickers[d.planted[2]]);
  } else {
    MarketConfig cfg;
    if (o.synth_assets > 0) cfg.assets = o.synth_assets;
    cfg.periods = o.synth_periods;
    const PriceMatrix p = market_prices(o.seed, cfg);
    write_text(o.out / "prices.csv", prices_csv(p));
    out << fmt::format("wrote {} x {} factor-model prices\n", p.T(), p.N());
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Sparse mean-reverting portfolio selection"};
  app.set_config("--config", "", "TOML/INI file; sections are named after commands");
  app.require_subcommand(1);

  auto* estimate = app.add_subcommand("estimate", "Estimate (M, A, phi) from a price CSV");
  estimate->add_option("--prices", o.prices, "Price CSV")->required()->check(CLI::ExistingFile);
  add_k(estimate, o);
  add_estimation_flags(estimate, o);
  add_out(estimate, o);

  auto* solve_cmd = app.add_subcommand("solve", "Solve an instance.json");
  solve_cmd->add_option("--instance", o.instance, "Instance JSON")
      ->required()
      ->check(CLI::ExistingFile);
  add_k(solve_cmd, o);
  add_solver_flags(solve_cmd, o);
  add_out(solve_cmd, o);

  auto* backtest = app.add_subcommand("backtest", "Backtest a solution on a price CSV");
  backtest->add_option("--prices", o.prices, "Price CSV")->required()->check(CLI::ExistingFile);
  backtest->add_option("--solution", o.solution, "Solution JSON")
      ->required()
      ->check(CLI::ExistingFile);
  add_band(backtest, o);
  add_out(backtest, o);

  auto* pipeline = app.add_subcommand("pipeline", "Estimate, solve and backtest");
  pipeline->add_option("--prices", o.prices, "Price CSV")->required()->check(CLI::ExistingFile);
  pipeline->add_option("--train-fraction", o.pipeline.train_fraction,
                       "Leading share of rows used for estimation")
      ->capture_default_str();
  add_k(pipeline, o);
  add_estimation_flags(pipeline, o);
  add_solver_flags(pipeline, o);
  add_band(pipeline, o);
  add_out(pipeline, o);

  auto* selfcheck = app.add_subcommand("selfcheck", "Run the oracle and property suites");
  selfcheck->add_flag("--inject-failure", o.inject_failure,
                      "Shrink every tolerance so the suites must report failures");
  selfcheck->add_option("--threads", o.pipeline.solver.greedy.threads, "Worker threads");

  auto* synth = app.add_subcommand("synth", "Write a synthetic price CSV");
  synth->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  synth->add_option("--kind", o.synth_kind, "planted or market")
      ->check(CLI::IsMember({"planted", "market"}))
      ->capture_default_str();
  synth->add_option("--assets", o.synth_assets, "Number of assets");
  synth->add_option("--periods", o.synth_periods, "Number of rows")->capture_default_str();
  add_out(synth, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kFailure;
  }

  try {
    if (*estimate) return cmd_estimate(o, out);
    if (*solve_cmd) return cmd_solve(o, out);
    if (*backtest) return cmd_backtest(o, out);
    if (*pipeline) return cmd_pipeline(o, out);
    if (*selfcheck) return cmd_selfcheck(o, out);
    if (*synth) return cmd_synth(o, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace mrp::cli
