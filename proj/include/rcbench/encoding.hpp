#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rcbench/datasets.hpp"

namespace rcbench {

inline constexpr std::size_t kSide = 32;
inline constexpr std::size_t kSequenceLength = kSide * kSide;  // 1,024
inline constexpr std::size_t kWindowBits = 8;
inline constexpr std::uint8_t kDefaultThreshold = 128;

/// 32x32 grid of {0,1}, row-major.
struct BinaryImage {
  std::size_t side = kSide;
  std::vector<std::uint8_t> bits = std::vector<std::uint8_t>(kSequenceLength, 0);

  std::uint8_t at(std::size_t row, std::size_t col) const { return bits[row * side + col]; }
  std::uint8_t& at(std::size_t row, std::size_t col) { return bits[row * side + col]; }
};

/// 1,024 bits in scan order.
struct BitSequence {
  std::vector<std::uint8_t> bits;
};

/// 1,024 drive symbols. Bit 7 (MSB) of a symbol is pad 7 and holds the
/// earliest bit of its window; bit 0 is pad 0 and holds the latest.
struct SymbolStream {
  std::vector<std::uint8_t> symbols;
};

GrayImage upsample_nearest(const GrayImage& img);

/// bit = pixel >= threshold.
BinaryImage binarize_fixed(const GrayImage& img, std::uint8_t threshold = kDefaultThreshold);

/// bit = value > mean(values). `values` is a 32x32 row-major matrix.
BinaryImage binarize_mean(std::span<const double> values);

struct GridPoint {
  std::uint32_t x = 0;  // column
  std::uint32_t y = 0;  // row
  bool operator==(const GridPoint&) const = default;
};

/// Position of index d along the Hilbert curve of the given order on a
/// 2^order x 2^order grid. The curve starts at (0,0) and its first step is
/// along y.
GridPoint hilbert_index_to_xy(unsigned order, std::uint64_t d);

BitSequence scan_hilbert(const BinaryImage& img);
BitSequence scan_vertical(const BinaryImage& img);

/// Stride-1, 8-bit windows over the sequence padded with 7 trailing zeros.
SymbolStream window_encode(const BitSequence& seq);

/// MNIST path: upsample, threshold, Hilbert scan.
BitSequence encode_image_bits(const GrayImage& img, std::uint8_t threshold = kDefaultThreshold);

// Debug dumps: one upper-case hex string per sequence. Bits are packed eight
// to a byte, earliest bit in the MSB.
std::string to_hex(const BitSequence& seq);
std::string to_hex(const SymbolStream& stream);

}  // namespace rcbench
