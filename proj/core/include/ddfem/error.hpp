#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ddfem {

enum class ErrorCode {
  kDimensionMismatch,
  kInvalidArgument,
  kMissingEpsilon,
  kNotFound,
  kDuplicate,
  kInvalidModel,
  kUntransformed,
  kNonFinite,
  kNotConverged,
  kParse,
  kIo,
};

std::string_view to_string(ErrorCode code);

/// Every failure the library reports carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// Numerical failures (as opposed to bad user input).
  bool is_numerical() const noexcept {
    return code_ == ErrorCode::kNotConverged || code_ == ErrorCode::kNonFinite;
  }

 private:
  ErrorCode code_;
};

}  // namespace ddfem
