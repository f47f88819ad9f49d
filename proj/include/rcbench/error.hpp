#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rcbench {

enum class ErrorCode {
  // datasets
  MagicMismatch,
  Truncated,
  InvalidLabel,
  UnsupportedFormat,
  Corrupt,
  InsufficientClass,
  NotDivisible,
  // encoding
  WrongShape,
  WrongLength,
  NonFinite,
  IndexOutOfRange,
  // audio features
  NegativeFrequency,
  InvalidParams,
  TooShort,
  Unfittable,
  // reservoir
  ConfigInvalid,
  NoConvergence,
  // readout
  DimensionMismatch,
  SingleClass,
  // evaluation
  TooFewSamples,
  LengthMismatch,
  Empty,
  // pipeline
  Io,
  Usage,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library. `code()` identifies the contract that
/// was violated; `what()` carries the human-readable context (file name,
/// offending value).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rcbench
