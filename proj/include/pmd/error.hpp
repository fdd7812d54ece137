#pragma once

#include <stdexcept>
#include <string>

namespace pmd {

/// Machine-readable error categories shared by the engine, the CLI and the
/// HTTP service. The names double as the `code` field of service errors.
enum class ErrorCode {
  kSyntaxError,
  kValidationError,
  kUnknownParameter,
  kValueNotInDomain,
  kMalformedDocument,
  kDanglingNodeReference,
  kInvalidGeometry,
  kZeroWidth,
  kEmptyGrid,
  kInvalidConfig,
  kUnknownClass,
  kUnstratifiedProgram,
  kGroundingError,
  kWorldCountExceeded,
  kDimensionMismatch,
  kOutOfBounds,
  kOutOfGrid,
  kAssignmentMismatch,
  kIoError,
};

const char* to_string(ErrorCode code) noexcept;

/// Base exception for all engine errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pmd
