#pragma once

#include <cstdint>
#include <vector>

#include "rcbench/encoding.hpp"

namespace rcbench {

struct NoiseConfig {
  double mu = 0.0;
  double sigma = 0.05;
  std::uint64_t seed = 0;
};

/// Bits as 0.0 / 1.0.
std::vector<double> features_direct(const BitSequence& seq);

/// Popcount of each zero-padded stride-1 window, 0..8.
std::vector<double> features_summed(const BitSequence& seq);

/// bit + N(mu, sigma^2), drawn from Rng(cfg.seed).
std::vector<double> features_noise(const BitSequence& seq, const NoiseConfig& cfg);

/// Per-example noise seed; independent of processing order.
constexpr std::uint64_t noise_seed_for(std::uint64_t master, std::uint64_t sample_index) noexcept {
  return master ^ sample_index;
}

}  // namespace rcbench
