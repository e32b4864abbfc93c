#include "mrp/estimation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/core.h>

#include "mrp/errors.hpp"

namespace mrp {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool digits(const std::string& s, std::size_t pos, std::size_t n) {
  if (pos + n > s.size()) return false;
  for (std::size_t i = pos; i < pos + n; ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

// YYYY-MM-DD, optionally followed by a time part introduced by 'T' or ' '.
bool iso_date(const std::string& s) {
  if (!digits(s, 0, 4) || s.size() < 10 || s[4] != '-' || !digits(s, 5, 2) || s[7] != '-' ||
      !digits(s, 8, 2))
    return false;
  const int month = std::stoi(s.substr(5, 2));
  const int day = std::stoi(s.substr(8, 2));
  if (month < 1 || month > 12 || day < 1 || day > 31) return false;
  return s.size() == 10 || s[10] == 'T' || s[10] == ' ';
}

Error ingest_error(const std::string& source, std::size_t row, std::size_t col,
                           const std::string& what) {
  return Error(ErrorKind::IngestError,
               fmt::format("{}: row {}, column {}: {}", source, row, col, what));
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

PriceMatrix PriceMatrix::slice(std::size_t first, std::size_t last) const {
  if (first >= last || last > T())
    throw Error(ErrorKind::InvalidInput, "price slice out of range");
  PriceMatrix out;
  out.tickers = tickers;
  out.dates.assign(dates.begin() + static_cast<std::ptrdiff_t>(first),
                   dates.begin() + static_cast<std::ptrdiff_t>(last));
  out.prices = prices.middleRows(static_cast<Eigen::Index>(first),
                                 static_cast<Eigen::Index>(last - first));
  return out;
}

PriceMatrix parse_prices(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t row = 1;
  if (!std::getline(in, line)) throw ingest_error(source, 1, 1, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split(line);
  if (header.size() < 2) throw ingest_error(source, 1, 1, "header needs a date and a ticker");
  for (std::size_t c = 1; c < header.size(); ++c)
    if (header[c].empty()) throw ingest_error(source, 1, c + 1, "empty ticker name");
  const std::size_t n = header.size() - 1;

  struct Row {
    std::string date;
    std::vector<double> values;
  };
  std::vector<Row> rows;
  std::size_t dropped = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != header.size())
      throw ingest_error(source, row, std::min(cells.size(), header.size()) + 1,
                         fmt::format("expected {} cells, found {}", header.size(), cells.size()));
    if (!iso_date(cells[0])) throw ingest_error(source, row, 1, "not an ISO-8601 date");
    if (std::any_of(cells.begin() + 1, cells.end(), [](const auto& c) { return c.empty(); })) {
      ++dropped;
      continue;
    }
    Row r{cells[0], std::vector<double>(n)};
    for (std::size_t c = 0; c < n; ++c) {
      const std::string& cell = cells[c + 1];
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end != cell.c_str() + cell.size() || !std::isfinite(v))
        throw ingest_error(source, row, c + 2, fmt::format("unparsable price '{}'", cell));
      if (v <= 0.0) throw ingest_error(source, row, c + 2, "price must be positive");
      r.values[c] = v;
    }
    rows.push_back(std::move(r));
  }

  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].date == rows[i - 1].date)
      throw Error(ErrorKind::IngestError,
                  fmt::format("{}: duplicate date {}", source, rows[i].date));
  if (rows.size() < 2)
    throw Error(ErrorKind::InsufficientData,
                fmt::format("{}: {} usable rows, need at least 2", source, rows.size()));

  PriceMatrix p;
  p.tickers.assign(header.begin() + 1, header.end());
  p.dropped_rows = dropped;
  p.prices.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
  for (std::size_t t = 0; t < rows.size(); ++t) {
    p.dates.push_back(rows[t].date);
    for (std::size_t c = 0; c < n; ++c)
      p.prices(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)) = rows[t].values[c];
  }
  return p;
}

PriceMatrix load_prices(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IngestError, fmt::format("cannot open {}", path.string()));
  return parse_prices(in, path.string());
}

void EstimationConfig::validate() const {
  if (!(ridge_B >= 0.0) || !(ridge_M >= 0.0) || !(ridge_A >= 0.0))
    throw Error(ErrorKind::InvalidInput, "ridge weights must be non-negative");
  if (!(phi_multiplier > 0.0))
    throw Error(ErrorKind::InvalidInput, "phi multiplier must be positive");
}

Matrix sample_covariance(const Matrix& S) {
  if (S.rows() < 2) throw Error(ErrorKind::InsufficientData, "covariance needs 2 observations");
  const Matrix c = S.rowwise() - S.colwise().mean();
  Matrix g = (c.transpose() * c) / static_cast<double>(S.rows() - 1);
  return 0.5 * (g + g.transpose());
}

Matrix fit_var1(const Matrix& S, double ridge) {
  const Eigen::Index t = S.rows();
  if (t < 3) throw Error(ErrorKind::InsufficientData, "VAR(1) needs 3 observations");
  const Matrix X0 = S.topRows(t - 1);
  const Matrix Y0 = S.bottomRows(t - 1);
  const Matrix X = X0.rowwise() - X0.colwise().mean();
  const Matrix Y = Y0.rowwise() - Y0.colwise().mean();
  Matrix G = X.transpose() * X;
  G.diagonal().array() += ridge;
  try {
    const Matrix rhs = X.transpose() * Y;
    Matrix b(rhs.rows(), rhs.cols());
    for (Eigen::Index j = 0; j < rhs.cols(); ++j) b.col(j) = solve_spd(SymMatrix(G), rhs.col(j));
    return b;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NotPositiveDefinite || e.kind() == ErrorKind::InvalidMatrix)
      throw Error(ErrorKind::EstimationError,
                  fmt::format("singular VAR(1) regression: {}", e.what()));
    throw;
  }
}

double volatility_threshold(const Vector& variances, double multiplier) {
  if (variances.size() == 0) throw Error(ErrorKind::InvalidInput, "no variances");
  return multiplier * median(std::vector<double>(variances.begin(), variances.end())) / 5.0;
}

Estimate build_instance(const PriceMatrix& p, std::size_t k, const EstimationConfig& cfg) {
  cfg.validate();
  const std::size_t n = p.N();
  if (p.T() < n + 2)
    throw Error(ErrorKind::InsufficientData,
                fmt::format("{} observations for {} assets, need at least {}", p.T(), n, n + 2));
  const Matrix S = p.prices.array().log().matrix();
  const Matrix gamma = sample_covariance(S);
  for (std::size_t i = 0; i < n; ++i)
    if (!(gamma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) > 0.0))
      throw Error(ErrorKind::EstimationError,
                  fmt::format("asset {} has zero variance", p.tickers[i]));

  const Eigen::Index t = S.rows();
  const Matrix X = S.topRows(t - 1).rowwise() - S.topRows(t - 1).colwise().mean();
  const double x_scale = (X.transpose() * X).trace() / static_cast<double>(n);
  const Matrix B = fit_var1(S, cfg.ridge_B * x_scale);

  const double g_scale = gamma.trace() / static_cast<double>(n);
  Matrix M = B.transpose() * gamma * B;
  M.diagonal().array() += cfg.ridge_M * g_scale;
  Matrix A = gamma;
  A.diagonal().array() += cfg.ridge_A * g_scale;
  const double phi = volatility_threshold(gamma.diagonal(), cfg.phi_multiplier);

  try {
    return {ProblemInstance(SymMatrix(M), SymMatrix(A), phi, k), B, gamma, p.tickers};
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NotPositiveDefinite || e.kind() == ErrorKind::InvalidMatrix)
      throw Error(ErrorKind::EstimationError,
                  fmt::format("estimated matrices are not positive definite: {}", e.what()));
    throw;
  }
}

}  // namespace mrp
