#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace rcbench {

using Digit = std::uint8_t;
inline constexpr int kNumClasses = 10;

struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  std::uint8_t at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }
};

struct AudioClip {
  std::uint32_t sample_rate = 0;
  std::vector<double> samples;  // in [-1, 1]
};

struct LabeledExample {
  std::variant<GrayImage, AudioClip> payload;
  Digit label = 0;
  std::string source;  // file name or "<file>#<index>", for diagnostics
};

// IDX (MNIST) files. Paths ending in ".gz" are decompressed transparently.
std::vector<GrayImage> load_idx_images(const std::filesystem::path& path);
std::vector<Digit> load_idx_labels(const std::filesystem::path& path);

// Parse from an in-memory (uncompressed) buffer; `origin` names it in errors.
std::vector<GrayImage> parse_idx_images(std::span<const std::uint8_t> bytes, const std::string& origin = "<memory>");
std::vector<Digit> parse_idx_labels(std::span<const std::uint8_t> bytes, const std::string& origin = "<memory>");

// Serializers for the same layout; used for fixtures and round-trip checks.
std::vector<std::uint8_t> serialize_idx_images(std::span<const GrayImage> images);
std::vector<std::uint8_t> serialize_idx_labels(std::span<const Digit> labels);

/// 16-bit PCM mono RIFF/WAVE only.
AudioClip load_wav(const std::filesystem::path& path);
AudioClip parse_wav(std::span<const std::uint8_t> bytes, const std::string& origin = "<memory>");
std::vector<std::uint8_t> serialize_wav(const AudioClip& clip);

/// MNIST images zipped with their labels.
std::vector<LabeledExample> load_mnist(const std::filesystem::path& images, const std::filesystem::path& labels);

/// AudioMNIST tree: <root>/<speaker>/<digit>_<speaker>_<take>.wav. Files are
/// visited in sorted path order. Clips are not decoded here; see
/// AudioFileRef and load_wav.
struct AudioFileRef {
  std::filesystem::path path;
  Digit label = 0;
};
std::vector<AudioFileRef> scan_audio_tree(const std::filesystem::path& root);

/// Indices selecting exactly n/10 examples of each digit. Each class is
/// shuffled with its own draw from the seeded generator and truncated; the
/// union is then shuffled once more so the output order mixes classes.
std::vector<std::size_t> stratified_subsample_indices(std::span<const Digit> labels, std::size_t n,
                                                      std::uint64_t seed);

/// Indices of n examples drawn uniformly without replacement.
std::vector<std::size_t> uniform_subsample_indices(std::size_t population, std::size_t n, std::uint64_t seed);

std::vector<LabeledExample> stratified_subsample(std::span<const LabeledExample> examples, std::size_t n,
                                                 std::uint64_t seed);

}  // namespace rcbench
