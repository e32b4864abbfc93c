#pragma once

// JSON artifacts (instance, solution, backtest report) and CSV series.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mrp/backtest.hpp"
#include "mrp/estimation.hpp"
#include "mrp/model.hpp"
#include "mrp/solver.hpp"

namespace mrp {

using Json = nlohmann::ordered_json;

struct InstanceFile {
  ProblemInstance instance;
  std::vector<std::string> tickers;
};

Json instance_to_json(const ProblemInstance& inst, const std::vector<std::string>& tickers);
/// Throws InvalidInput on a malformed document.
InstanceFile instance_from_json(const Json& j);

Json solution_to_json(const SolveReport& rep, const std::vector<std::string>& tickers);

/// The portfolio weights stored in a solution document.
Vector weights_from_solution(const Json& j);

Json report_to_json(const BacktestReport& rep, const std::vector<std::string>& dates);
BacktestReport report_from_json(const Json& j);

/// t,date,spread,pnl,roi with pnl and roi empty at t = 0.
std::string series_csv(const BacktestReport& rep, const std::vector<std::string>& dates);

std::string prices_csv(const PriceMatrix& p);

Json read_json(const std::filesystem::path& path);
/// Writes j.dump(2) followed by a newline.
void write_json(const std::filesystem::path& path, const Json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace mrp
