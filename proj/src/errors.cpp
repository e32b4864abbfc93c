#include "mrp/errors.hpp"

namespace mrp {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidMatrix: return "InvalidMatrix";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::InvalidIndexSet: return "InvalidIndexSet";
    case ErrorKind::InvalidSolution: return "InvalidSolution";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::DualUnbounded: return "DualUnbounded";
    case ErrorKind::DegenerateFace: return "DegenerateFace";
    case ErrorKind::IngestError: return "IngestError";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::EstimationError: return "EstimationError";
    case ErrorKind::InvalidPrice: return "InvalidPrice";
    case ErrorKind::NoVolatility: return "NoVolatility";
  }
  return "Unknown";
}

}  // namespace mrp
