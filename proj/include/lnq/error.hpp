#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lnq {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  LengthMismatch,
  EmptyInput,
  EmptyMask,
  EmptySurface,
  OutOfRange,
  UnsupportedFormat,
  CorruptFile,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Error raised for caller-visible failures (bad inputs, unreadable files).
/// Anything else escaping the library is an internal failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lnq
