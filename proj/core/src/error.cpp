#include "ddfem/error.hpp"

namespace ddfem {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kMissingEpsilon: return "missing_epsilon";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kDuplicate: return "duplicate";
    case ErrorCode::kInvalidModel: return "invalid_model";
    case ErrorCode::kUntransformed: return "untransformed";
    case ErrorCode::kNonFinite: return "non_finite";
    case ErrorCode::kNotConverged: return "not_converged";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace ddfem
