#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rcbench/datasets.hpp"

namespace rcbench {

inline constexpr std::size_t kMfccBands = 32;
inline constexpr std::size_t kMfccFrames = 32;
inline constexpr std::size_t kMfccFftSize = 2048;
inline constexpr double kLogFloor = 1e-10;

/// Row-major real matrix; rows x cols.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
};

/// 32 cepstral coefficients (rows) by 32 frames (cols).
struct Spectrogram {
  Matrix data;
};

struct MelFilterbank {
  std::size_t n_mels = 0;
  std::size_t n_bins = 0;       // n_fft / 2 + 1
  std::vector<double> edges_hz;  // n_mels + 2 edge frequencies
  Matrix weights;                // n_mels x n_bins
};

/// HTK mel scale: 2595 * log10(1 + f / 700).
double hz_to_mel(double hz);
double mel_to_hz(double mel);

MelFilterbank mel_filterbank(std::size_t n_mels, std::size_t n_fft, double sample_rate);

/// (n_fft/2 + 1) x n_frames power spectrogram with a periodic Hann window.
Matrix power_spectrogram(const AudioClip& clip, std::size_t n_fft, std::size_t hop);

/// Orthonormal DCT-II basis, n x n; row k is the k-th basis vector.
Matrix dct2_matrix(std::size_t n);

/// Throws Error{Unfittable} when the clip cannot produce 32 frames.
Spectrogram mfcc32(const AudioClip& clip);

/// As mfcc32, but returns nullopt instead of throwing Unfittable.
std::optional<Spectrogram> try_mfcc32(const AudioClip& clip);

std::string to_csv(const Spectrogram& spec);

}  // namespace rcbench
