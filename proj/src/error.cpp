#include "pmd/error.hpp"

namespace pmd {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kSyntaxError: return "SyntaxError";
    case ErrorCode::kValidationError: return "ValidationError";
    case ErrorCode::kUnknownParameter: return "UnknownParameter";
    case ErrorCode::kValueNotInDomain: return "ValueNotInDomain";
    case ErrorCode::kMalformedDocument: return "MalformedDocument";
    case ErrorCode::kDanglingNodeReference: return "DanglingNodeReference";
    case ErrorCode::kInvalidGeometry: return "InvalidGeometry";
    case ErrorCode::kZeroWidth: return "ZeroWidth";
    case ErrorCode::kEmptyGrid: return "EmptyGrid";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kUnknownClass: return "UnknownClass";
    case ErrorCode::kUnstratifiedProgram: return "UnstratifiedProgram";
    case ErrorCode::kGroundingError: return "GroundingError";
    case ErrorCode::kWorldCountExceeded: return "WorldCountExceeded";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kOutOfBounds: return "OutOfBounds";
    case ErrorCode::kOutOfGrid: return "OutOfGrid";
    case ErrorCode::kAssignmentMismatch: return "AssignmentMismatch";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace pmd
