#pragma once

#include <ostream>

namespace mrp::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kInfeasible = 2,
  kIngest = 3,
  kEstimation = 4,
  kConvergence = 5,
  kNoVolatility = 6,
};

/// Parses argv and runs the selected command. Never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mrp::cli
