#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace rcbench {

/// FNV-1a, 64-bit. Identifies configurations in cache file names and reports;
/// not a cryptographic hash.
constexpr std::uint64_t fnv1a64(std::string_view text, std::uint64_t hash = 0xcbf29ce484222325ULL) noexcept {
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string hex64(std::uint64_t value);

}  // namespace rcbench
