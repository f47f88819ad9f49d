#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "rcbench/encoding.hpp"

namespace rcbench {

inline constexpr std::size_t kPads = 8;
inline constexpr std::size_t kSubstepsPerSymbol = 8;
inline constexpr std::size_t kTraceLength = kSequenceLength * kSubstepsPerSymbol;  // 8,192

/// Stand-in for the piezoelectric cube: a leaky tanh network with one tanh
/// probe. Delay only enters through the leak rate (see delay_to_leak).
struct ReservoirConfig {
  std::size_t n_nodes = 64;
  double spectral_radius_target = 0.95;
  double input_scale = 1.0;
  double bias_scale = 0.1;
  double tau_ns = 20.0;
  std::size_t substeps_per_symbol = kSubstepsPerSymbol;
  double delay_ns = 10.0;
  std::uint64_t seed = 0;

  /// Stable textual form, hashed into cache keys and report metadata.
  std::string canonical() const;
};

struct Reservoir {
  ReservoirConfig config;
  Eigen::MatrixXd recurrent;  // n x n, spectral radius == target
  Eigen::MatrixXd input;      // n x 8, column p drives pad p
  Eigen::VectorXd bias;       // n
  Eigen::VectorXd probe;      // n, unit norm
  double leak = 0.0;

  /// input * pads(symbol) + bias for every symbol value; n x 256.
  Eigen::MatrixXd drive_table;
};

using Trace = std::vector<double>;

/// alpha = 1 - exp(-(delay / substeps) / tau), clamped to [1e-6, 1 - 1e-6].
double delay_to_leak(double delay_ns, double tau_ns, std::size_t substeps);

/// Largest eigenvalue modulus by power iteration. Each step fits the
/// recurrence M^2 u = a M u + b u to the current iterate, which captures a
/// dominant complex-conjugate (or +/- real) pair as well as a single dominant
/// real eigenvalue.
double spectral_radius(const Eigen::MatrixXd& m, std::size_t max_iter = 10000, double tol = 1e-10);

Reservoir build_reservoir(const ReservoirConfig& config);

/// Pad vector of a symbol: pad p is high iff bit p is set (pad 7 = MSB).
Eigen::Matrix<double, kPads, 1> symbol_pads(std::uint8_t symbol);

/// Runs the stream from the zero state.
Trace drive(const Reservoir& r, const SymbolStream& stream);

/// Runs the stream from an arbitrary initial state (size n_nodes).
Trace drive_from(const Reservoir& r, const SymbolStream& stream, const Eigen::VectorXd& initial_state);

}  // namespace rcbench
