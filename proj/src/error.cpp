#include "rcbench/error.hpp"

#include <cstdio>

#include "rcbench/digest.hpp"

namespace rcbench {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MagicMismatch: return "MagicMismatch";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::InvalidLabel: return "InvalidLabel";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::Corrupt: return "Corrupt";
    case ErrorCode::InsufficientClass: return "InsufficientClass";
    case ErrorCode::NotDivisible: return "NotDivisible";
    case ErrorCode::WrongShape: return "WrongShape";
    case ErrorCode::WrongLength: return "WrongLength";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NegativeFrequency: return "NegativeFrequency";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::Unfittable: return "Unfittable";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Usage: return "Usage";
  }
  return "Unknown";
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace rcbench
