#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

#include "smolgs/bytes.hpp"

namespace smolgs {

inline constexpr int kMaxHuffmanLength = 56;

/// Canonical Huffman code over the byte alphabet. Only the 256 code lengths
/// are transmitted; codes are assigned in (length, symbol) order.
class HuffmanTable {
 public:
  HuffmanTable() = default;

  /// Rebuilds canonical codes from lengths (0 = absent). Throws
  /// kCorruptStream if lengths exceed 56, violate Kraft, or are all zero.
  static HuffmanTable from_lengths(std::span<const std::uint8_t, 256> lengths);

  const std::array<std::uint8_t, 256>& code_lengths() const { return lengths_; }
  std::uint8_t length(std::uint8_t symbol) const { return lengths_[symbol]; }
  std::uint64_t code(std::uint8_t symbol) const { return codes_[symbol]; }
  int max_length() const { return max_length_; }

  /// Decodes one symbol by walking canonical first-code bounds.
  std::uint8_t decode_symbol(BitReader& reader) const;

 private:
  std::array<std::uint8_t, 256> lengths_{};
  std::array<std::uint64_t, 256> codes_{};
  std::array<std::uint64_t, kMaxHuffmanLength + 1> first_code_{};
  std::array<std::uint16_t, kMaxHuffmanLength + 1> first_index_{};
  std::array<std::uint16_t, kMaxHuffmanLength + 1> count_{};
  std::array<std::uint8_t, 256> sorted_symbols_{};
  int max_length_ = 0;
};

/// Huffman code lengths for the given counts. Merges pick the two lightest
/// live nodes ordered by (weight, smallest contained symbol). A single
/// present symbol gets length 1.
HuffmanTable huffman_build(std::span<const std::uint64_t, 256> frequencies);

std::array<std::uint64_t, 256> byte_histogram(std::span<const std::uint8_t> data);

struct HuffmanBits {
  Bytes bytes;
  std::uint64_t bit_count = 0;
};

HuffmanBits huffman_encode(std::span<const std::uint8_t> data, const HuffmanTable& table);

Bytes huffman_decode(std::span<const std::uint8_t> bits, std::uint64_t bit_count,
                     const HuffmanTable& table, std::size_t count);

/// Expected code length sum_s freq(s) * len(s), in bits.
std::uint64_t huffman_cost(std::span<const std::uint64_t, 256> frequencies,
                           const HuffmanTable& table);

}  // namespace smolgs
