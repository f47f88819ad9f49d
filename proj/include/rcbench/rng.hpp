#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace rcbench {

/// SplitMix64 finalizer. Used to turn a master seed plus a fixed per-purpose
/// offset into an independent seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Fixed offsets separating the seed streams derived from one master seed.
enum class SeedStream : std::uint64_t {
  Subsample = 1,
  Folds = 2,
  Reservoir = 3,
  Noise = 4,
  Readout = 5,
};

constexpr std::uint64_t derive_seed(std::uint64_t master, SeedStream stream) noexcept {
  return splitmix64(master + static_cast<std::uint64_t>(stream));
}

/// The single generator used for all sampling in the project.
///
/// Bits come from std::mt19937_64, whose output sequence is fixed by the
/// standard. Every distribution is implemented here rather than taken from
/// <random>, because the standard distributions are implementation-defined and
/// would make reports differ between standard libraries:
///   - uniform01: top 53 bits scaled by 2^-53, in [0, 1)
///   - below(n): Lemire's multiply-shift with rejection, unbiased
///   - normal: Box-Muller, both outputs of each pair used in order
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  std::uint64_t below(std::uint64_t n);

  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rcbench
