#include "rcbench/datasets.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "rcbench/error.hpp"
#include "rcbench/rng.hpp"

namespace rcbench {
namespace {

constexpr std::uint32_t kImageMagic = 2051;
constexpr std::uint32_t kLabelMagic = 2049;

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  const std::string name = path.string();
  if (name.size() > 3 && name.ends_with(".gz")) {
    gzFile gz = gzopen(name.c_str(), "rb");
    if (gz == nullptr) throw Error(ErrorCode::Io, "cannot open " + name);
    std::vector<std::uint8_t> out;
    std::array<std::uint8_t, 1 << 16> chunk{};
    int got = 0;
    while ((got = gzread(gz, chunk.data(), static_cast<unsigned>(chunk.size()))) > 0) {
      out.insert(out.end(), chunk.begin(), chunk.begin() + got);
    }
    const bool failed = got < 0;
    gzclose(gz);
    if (failed) throw Error(ErrorCode::Corrupt, "gzip stream error in " + name);
    return out;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + name);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t read_le32(std::span<const std::uint8_t> b, std::size_t o) {
  return std::uint32_t{b[o]} | (std::uint32_t{b[o + 1]} << 8) | (std::uint32_t{b[o + 2]} << 16) |
         (std::uint32_t{b[o + 3]} << 24);
}

std::uint16_t read_le16(std::span<const std::uint8_t> b, std::size_t o) {
  return static_cast<std::uint16_t>(b[o] | (b[o + 1] << 8));
}

void write_le32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void write_le16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void write_tag(std::vector<std::uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

}  // namespace

std::vector<GrayImage> parse_idx_images(std::span<const std::uint8_t> bytes, const std::string& origin) {
  if (bytes.size() < 16) throw Error(ErrorCode::Truncated, origin + ": header shorter than 16 bytes");
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != kImageMagic) {
    throw Error(ErrorCode::MagicMismatch, origin + ": expected magic 2051, found " + std::to_string(magic));
  }
  const std::size_t count = read_be32(bytes, 4);
  const std::size_t rows = read_be32(bytes, 8);
  const std::size_t cols = read_be32(bytes, 12);
  const std::size_t image_size = rows * cols;
  if (bytes.size() - 16 < count * image_size) {
    throw Error(ErrorCode::Truncated, origin + ": header promises " + std::to_string(count) + " images of " +
                                          std::to_string(rows) + "x" + std::to_string(cols) + ", payload has " +
                                          std::to_string(bytes.size() - 16) + " bytes");
  }
  std::vector<GrayImage> images(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto* first = bytes.data() + 16 + i * image_size;
    images[i] = GrayImage{cols, rows, std::vector<std::uint8_t>(first, first + image_size)};
  }
  return images;
}

std::vector<Digit> parse_idx_labels(std::span<const std::uint8_t> bytes, const std::string& origin) {
  if (bytes.size() < 8) throw Error(ErrorCode::Truncated, origin + ": header shorter than 8 bytes");
  const std::uint32_t magic = read_be32(bytes, 0);
  if (magic != kLabelMagic) {
    throw Error(ErrorCode::MagicMismatch, origin + ": expected magic 2049, found " + std::to_string(magic));
  }
  const std::size_t count = read_be32(bytes, 4);
  if (bytes.size() - 8 < count) {
    throw Error(ErrorCode::Truncated, origin + ": header promises " + std::to_string(count) + " labels, payload has " +
                                          std::to_string(bytes.size() - 8));
  }
  std::vector<Digit> labels(bytes.begin() + 8, bytes.begin() + 8 + static_cast<std::ptrdiff_t>(count));
  for (std::size_t i = 0; i < count; ++i) {
    if (labels[i] > 9) {
      throw Error(ErrorCode::InvalidLabel,
                  origin + ": label " + std::to_string(labels[i]) + " at index " + std::to_string(i));
    }
  }
  return labels;
}

std::vector<GrayImage> load_idx_images(const std::filesystem::path& path) {
  return parse_idx_images(read_file(path), path.string());
}

std::vector<Digit> load_idx_labels(const std::filesystem::path& path) {
  return parse_idx_labels(read_file(path), path.string());
}

std::vector<std::uint8_t> serialize_idx_images(std::span<const GrayImage> images) {
  std::vector<std::uint8_t> out;
  const std::size_t rows = images.empty() ? 0 : images.front().height;
  const std::size_t cols = images.empty() ? 0 : images.front().width;
  write_be32(out, kImageMagic);
  write_be32(out, static_cast<std::uint32_t>(images.size()));
  write_be32(out, static_cast<std::uint32_t>(rows));
  write_be32(out, static_cast<std::uint32_t>(cols));
  for (const auto& img : images) {
    if (img.width != cols || img.height != rows || img.pixels.size() != rows * cols) {
      throw Error(ErrorCode::WrongShape, "IDX images must share one shape");
    }
    out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  }
  return out;
}

std::vector<std::uint8_t> serialize_idx_labels(std::span<const Digit> labels) {
  std::vector<std::uint8_t> out;
  write_be32(out, kLabelMagic);
  write_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.insert(out.end(), labels.begin(), labels.end());
  return out;
}

AudioClip parse_wav(std::span<const std::uint8_t> b, const std::string& origin) {
  if (b.size() < 12 || std::memcmp(b.data(), "RIFF", 4) != 0 || std::memcmp(b.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorCode::Corrupt, origin + ": not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  AudioClip clip;
  std::size_t pos = 12;
  while (pos + 8 <= b.size()) {
    const std::uint32_t size = read_le32(b, pos + 4);
    const std::size_t body = pos + 8;
    if (size > b.size() - body) throw Error(ErrorCode::Corrupt, origin + ": chunk overruns file");
    if (std::memcmp(b.data() + pos, "fmt ", 4) == 0) {
      if (size < 16) throw Error(ErrorCode::Corrupt, origin + ": fmt chunk too short");
      const std::uint16_t format = read_le16(b, body);
      const std::uint16_t channels = read_le16(b, body + 2);
      const std::uint32_t rate = read_le32(b, body + 4);
      const std::uint16_t bits = read_le16(b, body + 14);
      if (format != 1) throw Error(ErrorCode::UnsupportedFormat, origin + ": format tag " + std::to_string(format) + " is not PCM");
      if (channels != 1) throw Error(ErrorCode::UnsupportedFormat, origin + ": " + std::to_string(channels) + " channels, expected mono");
      if (bits != 16) throw Error(ErrorCode::UnsupportedFormat, origin + ": " + std::to_string(bits) + "-bit samples, expected 16");
      if (rate == 0) throw Error(ErrorCode::Corrupt, origin + ": zero sample rate");
      clip.sample_rate = rate;
      have_fmt = true;
    } else if (std::memcmp(b.data() + pos, "data", 4) == 0) {
      if (!have_fmt) throw Error(ErrorCode::Corrupt, origin + ": data chunk before fmt chunk");
      const std::size_t n = size / 2;
      clip.samples.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto raw = static_cast<std::int16_t>(read_le16(b, body + 2 * i));
        clip.samples[i] = static_cast<double>(raw) / 32768.0;
      }
      return clip;
    }
    pos = body + size + (size & 1u);
  }
  throw Error(ErrorCode::Corrupt, origin + (have_fmt ? ": missing data chunk" : ": missing fmt chunk"));
}

AudioClip load_wav(const std::filesystem::path& path) { return parse_wav(read_file(path), path.string()); }

std::vector<std::uint8_t> serialize_wav(const AudioClip& clip) {
  const auto data_bytes = static_cast<std::uint32_t>(clip.samples.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  write_tag(out, "RIFF");
  write_le32(out, 36 + data_bytes);
  write_tag(out, "WAVE");
  write_tag(out, "fmt ");
  write_le32(out, 16);
  write_le16(out, 1);
  write_le16(out, 1);
  write_le32(out, clip.sample_rate);
  write_le32(out, clip.sample_rate * 2);
  write_le16(out, 2);
  write_le16(out, 16);
  write_tag(out, "data");
  write_le32(out, data_bytes);
  for (double s : clip.samples) {
    const double scaled = std::clamp(s * 32768.0, -32768.0, 32767.0);
    write_le16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::lround(scaled))));
  }
  return out;
}

std::vector<LabeledExample> load_mnist(const std::filesystem::path& images_path,
                                       const std::filesystem::path& labels_path) {
  auto images = load_idx_images(images_path);
  const auto labels = load_idx_labels(labels_path);
  if (images.size() != labels.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(images.size()) + " images but " +
                                               std::to_string(labels.size()) + " labels");
  }
  std::vector<LabeledExample> out;
  out.reserve(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    out.push_back({std::move(images[i]), labels[i], images_path.filename().string() + "#" + std::to_string(i)});
  }
  return out;
}

std::vector<AudioFileRef> scan_audio_tree(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw Error(ErrorCode::Io, root.string() + " is not a directory");
  std::vector<AudioFileRef> refs;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".wav") continue;
    const std::string stem = entry.path().filename().string();
    if (stem.empty() || stem[0] < '0' || stem[0] > '9') {
      throw Error(ErrorCode::InvalidLabel, entry.path().string() + ": file name does not start with a digit");
    }
    refs.push_back({entry.path(), static_cast<Digit>(stem[0] - '0')});
  }
  std::sort(refs.begin(), refs.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
  return refs;
}

std::vector<std::size_t> stratified_subsample_indices(std::span<const Digit> labels, std::size_t n,
                                                      std::uint64_t seed) {
  if (n % kNumClasses != 0) throw Error(ErrorCode::NotDivisible, std::to_string(n) + " is not divisible by 10");
  const std::size_t per_class = n / kNumClasses;
  std::array<std::vector<std::size_t>, kNumClasses> members;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= kNumClasses) throw Error(ErrorCode::InvalidLabel, "label " + std::to_string(labels[i]));
    members[labels[i]].push_back(i);
  }
  for (int c = 0; c < kNumClasses; ++c) {
    if (members[c].size() < per_class) {
      throw Error(ErrorCode::InsufficientClass, "class " + std::to_string(c) + " has " +
                                                    std::to_string(members[c].size()) + " members, need " +
                                                    std::to_string(per_class));
    }
  }
  Rng rng(seed);
  std::vector<std::size_t> picked;
  picked.reserve(n);
  for (auto& m : members) {
    rng.shuffle(std::span(m));
    picked.insert(picked.end(), m.begin(), m.begin() + static_cast<std::ptrdiff_t>(per_class));
  }
  rng.shuffle(std::span(picked));
  return picked;
}

std::vector<std::size_t> uniform_subsample_indices(std::size_t population, std::size_t n, std::uint64_t seed) {
  if (n > population) {
    throw Error(ErrorCode::TooFewSamples,
                "requested " + std::to_string(n) + " of " + std::to_string(population) + " examples");
  }
  std::vector<std::size_t> all(population);
  for (std::size_t i = 0; i < population; ++i) all[i] = i;
  Rng(seed).shuffle(std::span(all));
  all.resize(n);
  return all;
}

std::vector<LabeledExample> stratified_subsample(std::span<const LabeledExample> examples, std::size_t n,
                                                 std::uint64_t seed) {
  std::vector<Digit> labels;
  labels.reserve(examples.size());
  for (const auto& e : examples) labels.push_back(e.label);
  std::vector<LabeledExample> out;
  out.reserve(n);
  for (std::size_t i : stratified_subsample_indices(labels, n, seed)) out.push_back(examples[i]);
  return out;
}

}  // namespace rcbench
