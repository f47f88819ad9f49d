#include "rcbench/reservoir.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rcbench/error.hpp"
#include "rcbench/rng.hpp"

namespace rcbench {
namespace {

void validate(const ReservoirConfig& c) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); };
  if (c.n_nodes < 1) fail("n_nodes must be at least 1");
  if (!(c.spectral_radius_target > 0.0 && c.spectral_radius_target < 1.0)) fail("spectral_radius_target must lie in (0, 1)");
  if (!(c.tau_ns > 0.0) || !std::isfinite(c.tau_ns)) fail("tau_ns must be positive");
  if (!(c.delay_ns > 0.0) || !std::isfinite(c.delay_ns)) fail("delay_ns must be positive");
  if (c.substeps_per_symbol * kSequenceLength != kTraceLength) fail("substeps_per_symbol must be 8");
  if (!(c.input_scale >= 0.0) || !std::isfinite(c.input_scale)) fail("input_scale must be finite and >= 0");
  if (!(c.bias_scale >= 0.0) || !std::isfinite(c.bias_scale)) fail("bias_scale must be finite and >= 0");
}

}  // namespace

std::string ReservoirConfig::canonical() const {
  std::ostringstream out;
  out.precision(17);
  out << "reservoir/v1 n_nodes=" << n_nodes << " rho=" << spectral_radius_target << " input_scale=" << input_scale
      << " bias_scale=" << bias_scale << " tau_ns=" << tau_ns << " substeps=" << substeps_per_symbol
      << " delay_ns=" << delay_ns << " seed=" << seed;
  return out.str();
}

double delay_to_leak(double delay_ns, double tau_ns, std::size_t substeps) {
  if (!(delay_ns > 0.0) || !(tau_ns > 0.0) || substeps == 0) {
    throw Error(ErrorCode::InvalidParams, "delay, tau and substeps must be positive");
  }
  constexpr double kFloor = 1e-6;
  const double alpha = -std::expm1(-(delay_ns / static_cast<double>(substeps)) / tau_ns);
  return std::clamp(alpha, kFloor, 1.0 - kFloor);
}

double spectral_radius(const Eigen::MatrixXd& m, std::size_t max_iter, double tol) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::InvalidParams, "matrix is not square");
  if (!m.allFinite()) throw Error(ErrorCode::NonFinite, "matrix has non-finite entries");
  if (m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0) return 0.0;

  const Eigen::Index n = m.rows();
  Eigen::VectorXd u(n);
  Rng rng(0x5eed5eedULL);
  for (Eigen::Index i = 0; i < n; ++i) u[i] = 1.0 + rng.uniform(-0.5, 0.5);
  u.normalize();

  double previous = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd v = m * u;
    const Eigen::VectorXd w = m * v;
    const double v_norm = v.norm();
    const double w_norm = w.norm();
    if (v_norm == 0.0 || w_norm == 0.0) {
      // u fell into the null space; restart from a fresh direction.
      for (Eigen::Index i = 0; i < n; ++i) u[i] = rng.uniform(-1.0, 1.0);
      u.normalize();
      continue;
    }

    // Single dominant real eigenvalue: v ~ lambda u.
    const double lambda = v.dot(u);
    double estimate = std::abs(lambda);
    double residual = (v - lambda * u).norm() / v_norm;

    // Dominant pair: w ~ a v + b u, eigenvalues are the roots of z^2 - a z - b.
    const double g00 = v.squaredNorm();
    const double g01 = v.dot(u);
    const double g11 = u.squaredNorm();
    const double det = g00 * g11 - g01 * g01;
    if (det > 1e-12 * g00 * g11) {
      const double r0 = v.dot(w);
      const double r1 = u.dot(w);
      const double a = (r0 * g11 - r1 * g01) / det;
      const double b = (g00 * r1 - g01 * r0) / det;
      const double pair_residual = (w - a * v - b * u).norm() / w_norm;
      if (pair_residual < residual) {
        const double disc = a * a + 4.0 * b;
        estimate = disc < 0.0 ? std::sqrt(-b) : 0.5 * (std::abs(a) + std::sqrt(disc));
        residual = pair_residual;
      }
    }

    if (std::abs(estimate - previous) <= tol * estimate && residual <= 1e-8) return estimate;
    previous = estimate;
    u = w / w_norm;
  }
  throw Error(ErrorCode::NoConvergence, "power iteration did not converge in " + std::to_string(max_iter) + " steps");
}

Reservoir build_reservoir(const ReservoirConfig& config) {
  validate(config);
  const auto n = static_cast<Eigen::Index>(config.n_nodes);
  Rng rng(config.seed);

  Reservoir r;
  r.config = config;
  r.recurrent.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) r.recurrent(i, j) = rng.normal();
  }
  r.input.resize(n, kPads);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index p = 0; p < static_cast<Eigen::Index>(kPads); ++p) {
      r.input(i, p) = rng.uniform(-config.input_scale, config.input_scale);
    }
  }
  r.bias.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) r.bias[i] = rng.uniform(-config.bias_scale, config.bias_scale);
  r.probe.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) r.probe[i] = rng.normal();
  r.probe.normalize();

  const double radius = spectral_radius(r.recurrent);
  if (!(radius > 0.0)) throw Error(ErrorCode::ConfigInvalid, "recurrent matrix has zero spectral radius");
  r.recurrent *= config.spectral_radius_target / radius;

  r.leak = delay_to_leak(config.delay_ns, config.tau_ns, config.substeps_per_symbol);

  r.drive_table.resize(n, 256);
  for (int s = 0; s < 256; ++s) r.drive_table.col(s) = r.input * symbol_pads(static_cast<std::uint8_t>(s)) + r.bias;
  return r;
}

Eigen::Matrix<double, kPads, 1> symbol_pads(std::uint8_t symbol) {
  Eigen::Matrix<double, kPads, 1> pads;
  for (std::size_t p = 0; p < kPads; ++p) pads[static_cast<Eigen::Index>(p)] = (symbol >> p) & 1u ? 1.0 : 0.0;
  return pads;
}

Trace drive_from(const Reservoir& r, const SymbolStream& stream, const Eigen::VectorXd& initial_state) {
  if (stream.symbols.size() != kSequenceLength) {
    throw Error(ErrorCode::WrongLength, "symbol stream must hold 1024 symbols, got " + std::to_string(stream.symbols.size()));
  }
  if (initial_state.size() != r.recurrent.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "initial state size does not match n_nodes");
  }
  const double alpha = r.leak;
  Eigen::VectorXd x = initial_state;
  Eigen::VectorXd pre(x.size());
  Trace trace;
  trace.reserve(kTraceLength);
  for (std::uint8_t symbol : stream.symbols) {
    const auto drive = r.drive_table.col(symbol);
    for (std::size_t step = 0; step < r.config.substeps_per_symbol; ++step) {
      pre.noalias() = r.recurrent * x;
      pre += drive;
      x = (1.0 - alpha) * x + alpha * pre.array().tanh().matrix();
      trace.push_back(std::tanh(r.probe.dot(x)));
    }
  }
  return trace;
}

Trace drive(const Reservoir& r, const SymbolStream& stream) {
  return drive_from(r, stream, Eigen::VectorXd::Zero(r.recurrent.rows()));
}

}  // namespace rcbench
