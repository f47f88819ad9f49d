#include "rcbench/baselines.hpp"

#include "rcbench/error.hpp"
#include "rcbench/rng.hpp"

namespace rcbench {
namespace {

void require_length(const BitSequence& seq) {
  if (seq.bits.size() != kSequenceLength) {
    throw Error(ErrorCode::WrongLength, "bit sequence must hold 1024 bits, got " + std::to_string(seq.bits.size()));
  }
}

}  // namespace

std::vector<double> features_direct(const BitSequence& seq) {
  require_length(seq);
  std::vector<double> out(kSequenceLength);
  for (std::size_t i = 0; i < kSequenceLength; ++i) out[i] = seq.bits[i] ? 1.0 : 0.0;
  return out;
}

std::vector<double> features_summed(const BitSequence& seq) {
  require_length(seq);
  std::vector<double> out(kSequenceLength);
  for (std::size_t i = 0; i < kSequenceLength; ++i) {
    unsigned count = 0;
    for (std::size_t j = i; j < i + kWindowBits && j < kSequenceLength; ++j) count += seq.bits[j] ? 1u : 0u;
    out[i] = count;
  }
  return out;
}

std::vector<double> features_noise(const BitSequence& seq, const NoiseConfig& cfg) {
  require_length(seq);
  if (!(cfg.sigma >= 0.0)) throw Error(ErrorCode::InvalidParams, "noise sigma must be >= 0");
  std::vector<double> out = features_direct(seq);
  if (cfg.sigma == 0.0 && cfg.mu == 0.0) return out;
  Rng rng(cfg.seed);
  for (double& v : out) v += rng.normal(cfg.mu, cfg.sigma);
  return out;
}

}  // namespace rcbench
