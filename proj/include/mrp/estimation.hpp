#pragma once

// Price ingestion and the Box-Tiao matrices: a VAR(1) fit on log-prices gives
// M = B^T Gamma B (predictable variance) and A = Gamma (total variance).

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "mrp/model.hpp"
#include "mrp/numerics.hpp"

namespace mrp {

/// T x N strictly positive prices with ascending, unique dates.
struct PriceMatrix {
  std::vector<std::string> tickers;
  std::vector<std::string> dates;
  Matrix prices;
  std::size_t dropped_rows = 0;  // rows discarded for blank cells

  std::size_t T() const noexcept { return static_cast<std::size_t>(prices.rows()); }
  std::size_t N() const noexcept { return static_cast<std::size_t>(prices.cols()); }

  /// Rows [first, last).
  PriceMatrix slice(std::size_t first, std::size_t last) const;
};

/// Reads "date,TICKER1,..." CSV. Rows with a blank cell are dropped and
/// counted; output is sorted by date. Throws IngestError (with row/column) on
/// malformed content and InsufficientData with fewer than 2 usable rows.
PriceMatrix parse_prices(std::istream& in, const std::string& source = "<input>");
PriceMatrix load_prices(const std::filesystem::path& path);

struct EstimationConfig {
  double ridge_B = 1e-6;  // scaled by tr(X^T X) / N
  double ridge_M = 1e-8;  // scaled by tr(Gamma) / N
  double ridge_A = 1e-8;  // scaled by tr(Gamma) / N
  double phi_multiplier = 1.0;

  void validate() const;
};

/// Sample covariance of the columns of S (divisor T - 1).
Matrix sample_covariance(const Matrix& S);

/// Least-squares B of the row regression s_t = s_{t-1} B + c + e_t, where s_t
/// is row t of S, with absolute Tikhonov weight `ridge`. The predictable part
/// of a portfolio value s_t x is s_{t-1} B x, hence M = B^T Gamma B.
/// Throws EstimationError when the normal equations are singular.
Matrix fit_var1(const Matrix& S, double ridge);

/// phi = multiplier * median(variances) / 5.
double volatility_threshold(const Vector& variances, double multiplier);

struct Estimate {
  ProblemInstance instance;
  Matrix B;
  Matrix gamma;
  std::vector<std::string> tickers;
};

/// Throws InsufficientData when T < N + 2 and EstimationError on a
/// zero-variance asset or a singular regression.
Estimate build_instance(const PriceMatrix& p, std::size_t k, const EstimationConfig& cfg = {});

}  // namespace mrp
