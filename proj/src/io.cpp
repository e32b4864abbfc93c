#include "mrp/io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/core.h>

#include "mrp/errors.hpp"

namespace mrp {

namespace {

Json vec_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json mat_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec_json(m.row(i).transpose()));
  return rows;
}

Json index_json(const IndexSet& s) {
  Json a = Json::array();
  for (std::size_t i : s) a.push_back(i);
  return a;
}

Vector json_vec(const Json& j, const char* what) {
  if (!j.is_array()) throw Error(ErrorKind::InvalidInput, fmt::format("{} must be an array", what));
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw Error(ErrorKind::InvalidInput, fmt::format("{}[{}] is not a number", what, i));
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Matrix json_mat(const Json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw Error(ErrorKind::InvalidInput, fmt::format("{} must be a non-empty array", what));
  const auto n = static_cast<Eigen::Index>(j.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector row = json_vec(j[static_cast<std::size_t>(i)], what);
    if (row.size() != n)
      throw Error(ErrorKind::InvalidInput, fmt::format("{} must be square", what));
    m.row(i) = row.transpose();
  }
  return m;
}

template <class T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorKind::InvalidInput, fmt::format("missing field '{}'", key));
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidInput, fmt::format("field '{}': {}", key, e.what()));
  }
}

TradeAction action_from(const std::string& s) {
  if (s == "open_long") return TradeAction::OpenLong;
  if (s == "open_short") return TradeAction::OpenShort;
  if (s == "close") return TradeAction::Close;
  throw Error(ErrorKind::InvalidInput, fmt::format("unknown trade action '{}'", s));
}

}  // namespace

std::string format_double(double v) { return Json(v).dump(); }

Json instance_to_json(const ProblemInstance& inst, const std::vector<std::string>& tickers) {
  Json j;
  j["N"] = inst.N();
  j["k"] = inst.k();
  j["phi"] = inst.phi();
  j["tickers"] = tickers;
  j["M"] = mat_json(inst.M().matrix());
  j["A"] = mat_json(inst.A().matrix());
  return j;
}

InstanceFile instance_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidInput, "instance document must be an object");
  Matrix M = json_mat(field<Json>(j, "M"), "M");
  Matrix A = json_mat(field<Json>(j, "A"), "A");
  const double phi = field<double>(j, "phi");
  const auto k = field<std::size_t>(j, "k");
  std::vector<std::string> tickers;
  if (j.contains("tickers")) tickers = field<std::vector<std::string>>(j, "tickers");
  if (tickers.empty())
    for (Eigen::Index i = 0; i < M.rows(); ++i) tickers.push_back(fmt::format("x{}", i));
  if (tickers.size() != static_cast<std::size_t>(M.rows()))
    throw Error(ErrorKind::InvalidInput, "ticker count does not match the matrix order");
  return {ProblemInstance(SymMatrix(std::move(M)), SymMatrix(std::move(A)), phi, k),
          std::move(tickers)};
}

Json solution_to_json(const SolveReport& rep, const std::vector<std::string>& tickers) {
  const PortfolioSolution& sol = rep.solution();
  const PdDiagnostics& d = rep.stage_one.diagnostics;
  Json j;
  j["x"] = vec_json(sol.x());
  Json support;
  support["indices"] = index_json(sol.support());
  Json names = Json::array();
  for (std::size_t i : sol.support()) names.push_back(tickers.at(i));
  support["tickers"] = names;
  j["support"] = support;
  j["objective"] = sol.objective();
  j["variance"] = sol.variance();
  j["kkt_residual"] = sol.kkt_residual();
  j["dual_gap"] = rep.stage_two.restricted.cert.gap;
  j["constraint_active"] = sol.active_constraint();
  j["robinson"] = sol.robinson();
  j["stage_one_objective"] = rep.stage_one_objective();
  j["final_objective"] = rep.final_objective();

  Json one;
  one["support"] = index_json(rep.stage_one.L);
  one["objective"] = rep.stage_one.objective;
  one["kkt_residual"] = d.kkt_residual;
  one["outer_iterations"] = d.outer_iterations;
  one["inner_iterations"] = d.total_inner;
  one["nonconverged_inner"] = d.nonconverged_inner;
  one["outer_converged"] = d.outer_converged;
  one["final_rho"] = d.final_rho;
  one["final_xy_gap"] = d.final_xy_gap;
  one["y_block_kkt_residual"] = d.y_block_kkt_residual;
  one["support_fallback"] = d.support_fallback;
  j["stage_one"] = one;

  Json trace;
  trace["swap_size"] = rep.stage_two.trace.swap_size;
  trace["evaluated"] = rep.stage_two.trace.evaluated;
  Json steps = Json::array();
  for (const auto& s : rep.stage_two.trace.steps) {
    Json e;
    e["support"] = index_json(s.support);
    e["value"] = s.value;
    steps.push_back(e);
  }
  trace["steps"] = steps;
  j["trace"] = trace;
  return j;
}

Vector weights_from_solution(const Json& j) {
  if (!j.is_object() || !j.contains("x"))
    throw Error(ErrorKind::InvalidInput, "solution document has no 'x' field");
  return json_vec(j.at("x"), "x");
}

Json report_to_json(const BacktestReport& rep, const std::vector<std::string>& dates) {
  Json j;
  j["band_d"] = rep.band_d;
  j["gross_exposure"] = rep.gross_exposure;
  j["cum_pnl"] = rep.cum_pnl;
  j["sharpe"] = rep.sharpe;
  j["sharpe_defined"] = rep.sharpe_defined;
  j["mean_roi"] = rep.mean_roi;
  j["sd_roi"] = rep.sd_roi;
  j["band_mean"] = rep.trades.mean;
  j["band_sd"] = rep.trades.sd;
  Json trades = Json::array();
  for (const auto& e : rep.trades.events) {
    Json t;
    t["t"] = e.t;
    if (e.t < dates.size()) t["date"] = dates[e.t];
    t["action"] = to_string(e.action);
    t["spread"] = e.spread_value;
    trades.push_back(t);
  }
  j["trades"] = trades;
  j["spread"] = vec_json(rep.spread);
  j["pnl"] = vec_json(rep.pnl);
  j["roi"] = vec_json(rep.roi);
  return j;
}

BacktestReport report_from_json(const Json& j) {
  BacktestReport r;
  r.band_d = field<double>(j, "band_d");
  r.gross_exposure = field<double>(j, "gross_exposure");
  r.cum_pnl = field<double>(j, "cum_pnl");
  r.sharpe = field<double>(j, "sharpe");
  r.sharpe_defined = field<bool>(j, "sharpe_defined");
  r.mean_roi = field<double>(j, "mean_roi");
  r.sd_roi = field<double>(j, "sd_roi");
  r.trades.mean = field<double>(j, "band_mean");
  r.trades.sd = field<double>(j, "band_sd");
  for (const auto& t : field<Json>(j, "trades"))
    r.trades.events.push_back(
        {field<std::size_t>(t, "t"), action_from(field<std::string>(t, "action")),
         field<double>(t, "spread")});
  r.spread = json_vec(field<Json>(j, "spread"), "spread");
  r.pnl = json_vec(field<Json>(j, "pnl"), "pnl");
  r.roi = json_vec(field<Json>(j, "roi"), "roi");
  return r;
}

std::string series_csv(const BacktestReport& rep, const std::vector<std::string>& dates) {
  std::ostringstream out;
  out << "t,date,spread,pnl,roi\n";
  for (Eigen::Index t = 0; t < rep.spread.size(); ++t) {
    const auto ut = static_cast<std::size_t>(t);
    out << t << ',' << (ut < dates.size() ? dates[ut] : "") << ',' << format_double(rep.spread[t]);
    if (t == 0)
      out << ",,\n";
    else
      out << ',' << format_double(rep.pnl[t - 1]) << ',' << format_double(rep.roi[t - 1]) << '\n';
  }
  return out.str();
}

std::string prices_csv(const PriceMatrix& p) {
  std::ostringstream out;
  out << "date";
  for (const auto& t : p.tickers) out << ',' << t;
  out << '\n';
  for (std::size_t t = 0; t < p.T(); ++t) {
    out << p.dates[t];
    for (std::size_t c = 0; c < p.N(); ++c)
      out << ',' << format_double(p.prices(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)));
    out << '\n';
  }
  return out.str();
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidInput, fmt::format("cannot open {}", path.string()));
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidInput, fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidInput, fmt::format("cannot write {}", path.string()));
  out << text;
}

void write_json(const std::filesystem::path& path, const Json& j) {
  write_text(path, j.dump(2) + "\n");
}

}  // namespace mrp
