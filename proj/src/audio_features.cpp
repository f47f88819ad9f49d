#include "rcbench/audio_features.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <mutex>
#include <numbers>

#include "rcbench/error.hpp"

namespace rcbench {
namespace {

// FFTW's planner is not thread-safe; executing a finished plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

class RealFft {
 public:
  explicit RealFft(std::size_t n)
      : n_(n),
        in_(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
        out_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)))) {
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_.get(), out_.get(), FFTW_ESTIMATE);
  }
  ~RealFft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* input() { return in_.get(); }
  const fftw_complex* output() const { return out_.get(); }
  void execute() { fftw_execute(plan_); }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  std::unique_ptr<double, FftwFree> in_;
  std::unique_ptr<fftw_complex, FftwFree> out_;
  fftw_plan plan_ = nullptr;
};

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

double hz_to_mel(double hz) {
  if (!(hz >= 0.0)) throw Error(ErrorCode::NegativeFrequency, "frequency " + std::to_string(hz) + " Hz");
  return 2595.0 * std::log10(1.0 + hz / 700.0);
}

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank mel_filterbank(std::size_t n_mels, std::size_t n_fft, double sample_rate) {
  if (n_mels == 0 || !is_power_of_two(n_fft) || !(sample_rate > 0.0)) {
    throw Error(ErrorCode::InvalidParams, "n_mels " + std::to_string(n_mels) + ", n_fft " + std::to_string(n_fft) +
                                              ", sample rate " + std::to_string(sample_rate));
  }
  MelFilterbank fb;
  fb.n_mels = n_mels;
  fb.n_bins = n_fft / 2 + 1;
  fb.edges_hz.resize(n_mels + 2);
  const double mel_max = hz_to_mel(sample_rate / 2.0);
  for (std::size_t i = 0; i < n_mels + 2; ++i) {
    fb.edges_hz[i] = mel_to_hz(mel_max * static_cast<double>(i) / static_cast<double>(n_mels + 1));
  }
  fb.edges_hz.front() = 0.0;
  fb.edges_hz.back() = sample_rate / 2.0;

  fb.weights = Matrix{n_mels, fb.n_bins, std::vector<double>(n_mels * fb.n_bins, 0.0)};
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double lo = fb.edges_hz[m];
    const double mid = fb.edges_hz[m + 1];
    const double hi = fb.edges_hz[m + 2];
    bool any = false;
    for (std::size_t k = 0; k < fb.n_bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / static_cast<double>(n_fft);
      const double rising = (f - lo) / (mid - lo);
      const double falling = (hi - f) / (hi - mid);
      const double w = std::max(0.0, std::min(rising, falling));
      fb.weights.at(m, k) = w;
      any = any || w > 0.0;
    }
    if (!any) {
      throw Error(ErrorCode::InvalidParams, "mel filter " + std::to_string(m) + " covers no FFT bin; n_fft " +
                                                std::to_string(n_fft) + " is too small for " +
                                                std::to_string(n_mels) + " bands");
    }
  }
  return fb;
}

Matrix power_spectrogram(const AudioClip& clip, std::size_t n_fft, std::size_t hop) {
  if (!is_power_of_two(n_fft) || hop == 0) {
    throw Error(ErrorCode::InvalidParams, "n_fft " + std::to_string(n_fft) + ", hop " + std::to_string(hop));
  }
  const std::size_t len = clip.samples.size();
  if (len < n_fft) {
    throw Error(ErrorCode::TooShort, std::to_string(len) + " samples, need at least " + std::to_string(n_fft));
  }
  const std::size_t frames = (len - n_fft) / hop + 1;
  const std::size_t bins = n_fft / 2 + 1;

  std::vector<double> window(n_fft);
  for (std::size_t n = 0; n < n_fft; ++n) {
    window[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(n_fft));
  }

  Matrix power{bins, frames, std::vector<double>(bins * frames)};
  RealFft fft(n_fft);
  for (std::size_t t = 0; t < frames; ++t) {
    const double* frame = clip.samples.data() + t * hop;
    for (std::size_t n = 0; n < n_fft; ++n) fft.input()[n] = frame[n] * window[n];
    fft.execute();
    for (std::size_t k = 0; k < bins; ++k) {
      const double re = fft.output()[k][0];
      const double im = fft.output()[k][1];
      power.at(k, t) = re * re + im * im;
    }
  }
  return power;
}

Matrix dct2_matrix(std::size_t n) {
  Matrix t{n, n, std::vector<double>(n * n)};
  const double nd = static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / nd) : std::sqrt(2.0 / nd);
    for (std::size_t i = 0; i < n; ++i) {
      t.at(k, i) = scale * std::cos(std::numbers::pi * (static_cast<double>(i) + 0.5) * static_cast<double>(k) / nd);
    }
  }
  return t;
}

std::optional<Spectrogram> try_mfcc32(const AudioClip& clip) {
  const std::size_t len = clip.samples.size();
  if (len < kMfccFftSize || clip.sample_rate == 0) return std::nullopt;
  const std::size_t hop = (len - kMfccFftSize) / (kMfccFrames - 1);
  if (hop < 1) return std::nullopt;
  const Matrix power = power_spectrogram(clip, kMfccFftSize, hop);
  if (power.cols < kMfccFrames) return std::nullopt;

  const MelFilterbank fb = mel_filterbank(kMfccBands, kMfccFftSize, clip.sample_rate);
  const Matrix dct = dct2_matrix(kMfccBands);

  Spectrogram out{Matrix{kMfccBands, kMfccFrames, std::vector<double>(kMfccBands * kMfccFrames)}};
  std::vector<double> log_mel(kMfccBands);
  for (std::size_t t = 0; t < kMfccFrames; ++t) {
    for (std::size_t m = 0; m < kMfccBands; ++m) {
      double energy = 0.0;
      for (std::size_t k = 0; k < fb.n_bins; ++k) energy += fb.weights.at(m, k) * power.at(k, t);
      log_mel[m] = std::log(energy + kLogFloor);
    }
    for (std::size_t c = 0; c < kMfccBands; ++c) {
      double acc = 0.0;
      for (std::size_t m = 0; m < kMfccBands; ++m) acc += dct.at(c, m) * log_mel[m];
      out.data.at(c, t) = acc;
    }
  }
  return out;
}

Spectrogram mfcc32(const AudioClip& clip) {
  auto spec = try_mfcc32(clip);
  if (!spec) {
    throw Error(ErrorCode::Unfittable, std::to_string(clip.samples.size()) + " samples cannot yield 32 frames of " +
                                           std::to_string(kMfccFftSize));
  }
  return std::move(*spec);
}

std::string to_csv(const Spectrogram& spec) {
  std::string out;
  char buf[32];
  for (std::size_t r = 0; r < spec.data.rows; ++r) {
    for (std::size_t c = 0; c < spec.data.cols; ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", spec.data.at(r, c));
      if (c != 0) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace rcbench
