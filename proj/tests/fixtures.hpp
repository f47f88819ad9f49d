#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "rcbench/datasets.hpp"
#include "rcbench/encoding.hpp"
#include "rcbench/rng.hpp"

namespace rcbench::testing {

/// Directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("rcbench-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline BitSequence random_bits(Rng& rng, double p_one = 0.5) {
  BitSequence seq{std::vector<std::uint8_t>(kSequenceLength)};
  for (auto& b : seq.bits) b = rng.uniform01() < p_one ? 1 : 0;
  return seq;
}

/// 28x28 image of a bar whose orientation depends on the digit, plus speckle.
inline GrayImage synthetic_digit(Digit label, Rng& rng) {
  GrayImage img{28, 28, std::vector<std::uint8_t>(28 * 28, 0)};
  for (int r = 4; r < 24; ++r) {
    for (int c = 4; c < 24; ++c) {
      const bool on = (label % 2 == 0) ? (c >= 6 + label && c < 10 + label) : (r >= 5 + label && r < 9 + label);
      if (on) img.pixels[static_cast<std::size_t>(r * 28 + c)] = 230;
    }
  }
  for (int k = 0; k < 12; ++k) img.pixels[rng.below(28 * 28)] = 255;
  return img;
}

/// Spoken-digit stand-in: two harmonics whose pitch depends on the digit,
/// with an amplitude envelope and a little noise.
inline AudioClip synthetic_utterance(Digit label, Rng& rng, std::uint32_t sample_rate = 16000, double seconds = 0.5) {
  AudioClip clip{sample_rate, std::vector<double>(static_cast<std::size_t>(seconds * sample_rate))};
  const double f0 = 180.0 + 90.0 * label;
  const double sweep = (label % 3) * 150.0;
  const double n = static_cast<double>(clip.samples.size());
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    const double env = std::sin(std::numbers::pi * static_cast<double>(i) / n);
    const double f = f0 + sweep * static_cast<double>(i) / n;
    clip.samples[i] = 0.4 * env * (std::sin(2 * std::numbers::pi * f * t) + 0.5 * std::sin(2 * std::numbers::pi * 2.7 * f * t)) +
                      0.01 * rng.normal();
  }
  return clip;
}

/// Writes an AudioMNIST-style tree: <root>/<speaker>/<digit>_<speaker>_<take>.wav.
/// Returns the number of clips written.
inline std::size_t write_audio_tree(const std::filesystem::path& root, std::size_t per_class, std::uint64_t seed) {
  Rng rng(seed);
  std::size_t written = 0;
  for (std::size_t take = 0; take < per_class; ++take) {
    const std::string speaker = take % 2 == 0 ? "01" : "02";
    for (Digit d = 0; d < kNumClasses; ++d) {
      const auto clip = synthetic_utterance(d, rng);
      write_bytes(root / speaker / (std::to_string(d) + "_" + speaker + "_" + std::to_string(take) + ".wav"),
                  serialize_wav(clip));
      ++written;
    }
  }
  return written;
}

}  // namespace rcbench::testing
