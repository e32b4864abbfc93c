#pragma once

// Oracle and property suites shared by `selfcheck` and the acceptance runner.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace mrp::checks {

struct SuiteOptions {
  std::uint64_t seed = 20240601;
  double tolerance_scale = 1.0;  // multiplies every tolerance; tiny values force failures
  unsigned threads = 0;
};

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::size_t allowed_failures = 0;
  double seconds = 0.0;
  std::string detail;

  bool passed() const noexcept { return cases > 0 && failures <= allowed_failures; }
};

/// solve_py against enumeration of every support; 200 cases with N <= 10.
SuiteResult sparse_projection(const SuiteOptions& opt, std::size_t cases = 200);

/// x-block duality gap, norm bound and the 2-D polar oracle; 200 cases.
SuiteResult x_block(const SuiteOptions& opt, std::size_t cases = 200);

/// Restricted problem of order <= 3 against a sphere grid; 100 cases.
SuiteResult restricted_qcqp(const SuiteOptions& opt, std::size_t cases = 100);

/// Rank reduction of random PSD matrices of rank <= 6; 500 cases.
SuiteResult rank_reduction(const SuiteOptions& opt, std::size_t cases = 500);

/// Inner-loop monotonicity of q_rho and stage-one stationarity on the same
/// N = 8, k = 3 instances. Returns {monotonicity, stationarity}.
std::vector<SuiteResult> penalty_decomposition(const SuiteOptions& opt, std::size_t cases = 50);

/// Two-stage solver against exhaustive support enumeration on instances
/// estimated from seeded 12-asset market data, k = 4.
SuiteResult greedy_quality(const SuiteOptions& opt, std::size_t cases = 20);

/// Planted cointegrated triple among 9 assets; at least 16 of 20 recovered.
SuiteResult planted_recovery(const SuiteOptions& opt, std::size_t cases = 20);

/// Hand-built backtest fixtures.
SuiteResult backtest_fixture(const SuiteOptions& opt);

std::vector<SuiteResult> run_all(const SuiteOptions& opt);

}  // namespace mrp::checks
