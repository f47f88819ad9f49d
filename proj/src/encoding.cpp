#include "rcbench/encoding.hpp"

#include <cmath>

#include "rcbench/error.hpp"

namespace rcbench {
namespace {

void require_binary_shape(const BinaryImage& img) {
  if (img.side != kSide || img.bits.size() != kSequenceLength) {
    throw Error(ErrorCode::WrongShape, "binary image must be 32x32, got side " + std::to_string(img.side) +
                                           " with " + std::to_string(img.bits.size()) + " bits");
  }
}

void require_sequence_length(const BitSequence& seq) {
  if (seq.bits.size() != kSequenceLength) {
    throw Error(ErrorCode::WrongLength, "bit sequence must hold 1024 bits, got " + std::to_string(seq.bits.size()));
  }
}

}  // namespace

GrayImage upsample_nearest(const GrayImage& img) {
  constexpr std::size_t kIn = 28;
  if (img.width != kIn || img.height != kIn || img.pixels.size() != kIn * kIn) {
    throw Error(ErrorCode::WrongShape,
                "expected 28x28 input, got " + std::to_string(img.width) + "x" + std::to_string(img.height));
  }
  GrayImage out{kSide, kSide, std::vector<std::uint8_t>(kSequenceLength)};
  for (std::size_t r = 0; r < kSide; ++r) {
    for (std::size_t c = 0; c < kSide; ++c) {
      out.pixels[r * kSide + c] = img.at(r * kIn / kSide, c * kIn / kSide);
    }
  }
  return out;
}

BinaryImage binarize_fixed(const GrayImage& img, std::uint8_t threshold) {
  if (img.width != kSide || img.height != kSide || img.pixels.size() != kSequenceLength) {
    throw Error(ErrorCode::WrongShape,
                "expected 32x32 input, got " + std::to_string(img.width) + "x" + std::to_string(img.height));
  }
  BinaryImage out;
  for (std::size_t i = 0; i < kSequenceLength; ++i) out.bits[i] = img.pixels[i] >= threshold ? 1 : 0;
  return out;
}

BinaryImage binarize_mean(std::span<const double> values) {
  if (values.size() != kSequenceLength) {
    throw Error(ErrorCode::WrongShape, "expected 1024 values, got " + std::to_string(values.size()));
  }
  double sum = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "matrix contains a non-finite value");
    sum += v;
  }
  const double mean = sum / static_cast<double>(values.size());
  BinaryImage out;
  for (std::size_t i = 0; i < kSequenceLength; ++i) out.bits[i] = values[i] > mean ? 1 : 0;
  return out;
}

GridPoint hilbert_index_to_xy(unsigned order, std::uint64_t d) {
  if (order == 0 || order > 31 || d >= (std::uint64_t{1} << (2 * order))) {
    throw Error(ErrorCode::IndexOutOfRange,
                "index " + std::to_string(d) + " outside a Hilbert curve of order " + std::to_string(order));
  }
  const std::uint64_t n = std::uint64_t{1} << order;
  std::uint64_t x = 0;
  std::uint64_t y = 0;
  std::uint64_t t = d;
  for (std::uint64_t s = 1; s < n; s *= 2) {
    const std::uint64_t rx = 1 & (t / 2);
    const std::uint64_t ry = 1 & (t ^ rx);
    if (ry == 0) {
      if (rx == 1) {
        x = s - 1 - x;
        y = s - 1 - y;
      }
      std::swap(x, y);
    }
    x += s * rx;
    y += s * ry;
    t /= 4;
  }
  return {static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y)};
}

BitSequence scan_hilbert(const BinaryImage& img) {
  require_binary_shape(img);
  constexpr unsigned kOrder = 5;
  BitSequence seq{std::vector<std::uint8_t>(kSequenceLength)};
  for (std::size_t i = 0; i < kSequenceLength; ++i) {
    const GridPoint p = hilbert_index_to_xy(kOrder, i);
    seq.bits[i] = img.at(p.y, p.x);
  }
  return seq;
}

BitSequence scan_vertical(const BinaryImage& img) {
  require_binary_shape(img);
  BitSequence seq{std::vector<std::uint8_t>(kSequenceLength)};
  for (std::size_t c = 0; c < kSide; ++c) {
    for (std::size_t r = 0; r < kSide; ++r) seq.bits[c * kSide + r] = img.at(r, c);
  }
  return seq;
}

SymbolStream window_encode(const BitSequence& seq) {
  require_sequence_length(seq);
  SymbolStream out{std::vector<std::uint8_t>(kSequenceLength)};
  for (std::size_t i = 0; i < kSequenceLength; ++i) {
    unsigned symbol = 0;
    for (std::size_t j = 0; j < kWindowBits; ++j) {
      const std::size_t pos = i + j;
      const unsigned bit = pos < kSequenceLength ? (seq.bits[pos] & 1u) : 0u;
      symbol = (symbol << 1) | bit;
    }
    out.symbols[i] = static_cast<std::uint8_t>(symbol);
  }
  return out;
}

BitSequence encode_image_bits(const GrayImage& img, std::uint8_t threshold) {
  return scan_hilbert(binarize_fixed(upsample_nearest(img), threshold));
}

std::string to_hex(const BitSequence& seq) {
  static constexpr char kDigits[] = "0123456789ABCDEF";
  std::string out;
  out.reserve((seq.bits.size() + 3) / 4);
  for (std::size_t i = 0; i < seq.bits.size(); i += 8) {
    unsigned byte = 0;
    for (std::size_t j = 0; j < 8; ++j) {
      byte = (byte << 1) | (i + j < seq.bits.size() ? (seq.bits[i + j] & 1u) : 0u);
    }
    out += kDigits[byte >> 4];
    out += kDigits[byte & 15];
  }
  return out;
}

std::string to_hex(const SymbolStream& stream) {
  static constexpr char kDigits[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(stream.symbols.size() * 2);
  for (std::uint8_t s : stream.symbols) {
    out += kDigits[s >> 4];
    out += kDigits[s & 15];
  }
  return out;
}

}  // namespace rcbench
