#include "lnq/error.hpp"

namespace lnq {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::EmptySurface: return "EmptySurface";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace lnq
