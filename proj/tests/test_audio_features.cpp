#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "fixtures.hpp"
#include "rcbench/audio_features.hpp"
#include "rcbench/error.hpp"

using namespace rcbench;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an rcbench::Error");
  return ErrorCode::Usage;
}

// O(N^2) DFT of one Hann-windowed frame; returns |X_k|^2 for k = 0..N/2.
std::vector<double> naive_power(const std::vector<double>& samples, std::size_t offset, std::size_t n) {
  std::vector<double> out(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    std::complex<double> acc{};
    for (std::size_t t = 0; t < n; ++t) {
      const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * double(t) / double(n));
      acc += w * samples[offset + t] * std::polar(1.0, -2.0 * std::numbers::pi * double(k) * double(t) / double(n));
    }
    out[k] = std::norm(acc);
  }
  return out;
}

}  // namespace

TEST_CASE("hz_to_mel") {
  CHECK(hz_to_mel(0.0) == 0.0);
  CHECK(hz_to_mel(700.0) == doctest::Approx(2595.0 * std::log10(2.0)).epsilon(1e-12));
  CHECK(hz_to_mel(700.0) == doctest::Approx(781.1728).epsilon(1e-6));
  CHECK(hz_to_mel(6300.0) == doctest::Approx(2595.0).epsilon(1e-12));
  CHECK(mel_to_hz(hz_to_mel(1234.5)) == doctest::Approx(1234.5).epsilon(1e-12));
  CHECK(code_of([] { hz_to_mel(-1.0); }) == ErrorCode::NegativeFrequency);

  double prev = -1.0;
  for (int i = 0; i < 1000; ++i) {
    const double mel = hz_to_mel(24000.0 * i / 999.0);
    REQUIRE(mel > prev);
    prev = mel;
  }
}

TEST_CASE("mel_filterbank construction") {
  const auto fb = mel_filterbank(32, 2048, 48000.0);
  CHECK(fb.n_bins == 1025);
  REQUIRE(fb.edges_hz.size() == 34);
  CHECK(fb.edges_hz.front() == 0.0);
  CHECK(fb.edges_hz.back() == 24000.0);

  std::size_t prev_peak = 0;
  for (std::size_t m = 0; m < 32; ++m) {
    double row_max = 0.0;
    std::size_t peak = 0;
    for (std::size_t k = 0; k < fb.n_bins; ++k) {
      const double w = fb.weights.at(m, k);
      REQUIRE(w >= 0.0);
      if (w > row_max) {
        row_max = w;
        peak = k;
      }
    }
    CHECK(row_max > 0.0);
    CHECK(peak >= prev_peak);
    prev_peak = peak;
  }

  // Every bin strictly inside the outer edges carries filter weight.
  for (std::size_t k = 0; k < fb.n_bins; ++k) {
    const double f = double(k) * 48000.0 / 2048.0;
    if (!(f > fb.edges_hz.front() && f < fb.edges_hz.back())) continue;
    double total = 0.0;
    for (std::size_t m = 0; m < 32; ++m) total += fb.weights.at(m, k);
    REQUIRE(total > 0.0);
  }

  CHECK(code_of([] { mel_filterbank(32, 1000, 48000.0); }) == ErrorCode::InvalidParams);
  CHECK(code_of([] { mel_filterbank(32, 2048, 0.0); }) == ErrorCode::InvalidParams);
  CHECK(code_of([] { mel_filterbank(32, 16, 48000.0); }) == ErrorCode::InvalidParams);
}

TEST_CASE("power_spectrogram") {
  const AudioClip silence{16000, std::vector<double>(4096, 0.0)};
  const auto zero = power_spectrogram(silence, 1024, 256);
  CHECK(zero.rows == 513);
  CHECK(zero.cols == (4096 - 1024) / 256 + 1);
  for (double v : zero.values) REQUIRE(v == 0.0);

  // Sinusoid at the centre of bin 64: the Hann main lobe (bins 63..65)
  // carries essentially all of the frame energy, bin 64 itself two thirds.
  const std::size_t n = 2048;
  const std::size_t bin = 64;
  AudioClip tone{48000, std::vector<double>(3 * n)};
  for (std::size_t i = 0; i < tone.samples.size(); ++i) {
    tone.samples[i] = 0.8 * std::sin(2.0 * std::numbers::pi * double(bin) * double(i) / double(n));
  }
  const auto spec = power_spectrogram(tone, n, 512);
  const auto oracle = naive_power(tone.samples, 512, n);
  double total = 0.0;
  for (std::size_t k = 0; k < spec.rows; ++k) {
    REQUIRE(spec.at(k, 1) == doctest::Approx(oracle[k]).epsilon(1e-9).scale(oracle[bin]));
    total += spec.at(k, 1);
  }
  const double lobe = spec.at(bin - 1, 1) + spec.at(bin, 1) + spec.at(bin + 1, 1);
  CHECK(lobe / total >= 0.9);
  CHECK(spec.at(bin, 1) / total == doctest::Approx(2.0 / 3.0).epsilon(1e-6));

  CHECK(code_of([] { power_spectrogram(AudioClip{8000, std::vector<double>(100)}, 2048, 1); }) == ErrorCode::TooShort);
}

TEST_CASE("dct2_matrix is orthonormal") {
  const auto t = dct2_matrix(32);
  for (std::size_t i = 0; i < 32; ++i) {
    for (std::size_t j = 0; j < 32; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < 32; ++k) dot += t.at(i, k) * t.at(j, k);
      REQUIRE(std::abs(dot - (i == j ? 1.0 : 0.0)) <= 1e-9);
    }
  }
}

TEST_CASE("mfcc32") {
  CHECK(code_of([] { mfcc32(AudioClip{48000, std::vector<double>(480, 0.1)}); }) == ErrorCode::Unfittable);
  CHECK_FALSE(try_mfcc32(AudioClip{48000, std::vector<double>(2048 + 30, 0.1)}).has_value());
  CHECK(try_mfcc32(AudioClip{48000, std::vector<double>(2048 + 31, 0.1)}).has_value());

  // Silence: log-mel is the constant log(1e-10) in every band, so only the
  // DC coefficient survives the orthonormal DCT: sqrt(32) * log(1e-10).
  const auto silence = mfcc32(AudioClip{48000, std::vector<double>(48000, 0.0)});
  REQUIRE(silence.data.rows == 32);
  REQUIRE(silence.data.cols == 32);
  for (std::size_t t = 0; t < 32; ++t) {
    CHECK(silence.data.at(0, t) == doctest::Approx(std::sqrt(32.0) * std::log(1e-10)).epsilon(1e-12));
    for (std::size_t c = 1; c < 32; ++c) REQUIRE(std::abs(silence.data.at(c, t)) < 1e-9);
  }

  Rng rng(3);
  const auto clip = testing::synthetic_utterance(4, rng, 48000, 0.7);
  const auto a = mfcc32(clip);
  const auto b = mfcc32(clip);
  CHECK(a.data.values == b.data.values);
  for (double v : a.data.values) REQUIRE(std::isfinite(v));
}

TEST_CASE("mfcc32 shape over AudioMNIST-like durations") {
  Rng rng(11);
  for (double seconds : {0.05, 0.25, 0.5, 0.75, 1.0}) {
    const auto spec = mfcc32(testing::synthetic_utterance(7, rng, 48000, seconds));
    CHECK(spec.data.rows == 32);
    CHECK(spec.data.cols == 32);
    for (double v : spec.data.values) REQUIRE(std::isfinite(v));
  }
}

TEST_CASE("spectrogram CSV dump") {
  Spectrogram s{Matrix{32, 32, std::vector<double>(1024, 0.5)}};
  const auto csv = to_csv(s);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 32);
  CHECK(std::count(csv.begin(), csv.end(), ',') == 32 * 31);
}
