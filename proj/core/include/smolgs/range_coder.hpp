#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "smolgs/bytes.hpp"

namespace smolgs {

inline constexpr int kFrequencyBits = 16;
inline constexpr std::uint32_t kMaxTotalFrequency = 1u << kFrequencyBits;

/// Static frequency table over symbols 0..size()-1; every frequency >= 1 and
/// the total is at most 2^16.
class SymbolModel {
 public:
  SymbolModel() = default;
  /// Throws kInvalidValue on a zero frequency or an oversize total.
  explicit SymbolModel(std::span<const std::uint32_t> frequencies);

  std::size_t size() const { return cum_.empty() ? 0 : cum_.size() - 1; }
  std::uint32_t total() const { return cum_.empty() ? 0 : cum_.back(); }
  std::uint32_t cumulative(std::size_t symbol) const { return cum_[symbol]; }
  std::uint32_t frequency(std::size_t symbol) const { return cum_[symbol + 1] - cum_[symbol]; }
  /// Symbol s with cumulative(s) <= target < cumulative(s + 1).
  std::size_t find(std::uint32_t target) const;
  double probability(std::size_t symbol) const {
    return static_cast<double>(frequency(symbol)) / static_cast<double>(total());
  }

  friend bool operator==(const SymbolModel&, const SymbolModel&) = default;

 private:
  std::vector<std::uint32_t> cum_;
};

// Carry-propagating range coder: 33-bit low in a 64-bit register, 32-bit
// range, byte-wise renormalisation below 2^24. The first emitted byte is
// always 0 and finish() flushes 5 bytes. Sub-intervals are
// [floor(range*cum/T), floor(range*(cum+freq)/T)), which tile the current
// range exactly.
class RangeEncoder {
 public:
  void encode(std::uint32_t symbol, const SymbolModel& model);
  Bytes finish();

 private:
  void shift_low();

  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint8_t cache_ = 0;
  std::uint64_t cache_size_ = 1;
  Bytes out_;
};

class RangeDecoder {
 public:
  /// Throws kCorruptStream if the stream is shorter than the 5-byte preamble
  /// or its first byte is non-zero.
  explicit RangeDecoder(std::span<const std::uint8_t> data);

  std::uint32_t decode(const SymbolModel& model);
  std::size_t consumed() const { return pos_; }
  /// Throws kCorruptStream unless every input byte was consumed.
  void expect_end() const;

 private:
  std::uint8_t next_byte();

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint32_t code_ = 0;
};

using ModelProvider = std::function<const SymbolModel&(std::size_t position)>;

Bytes range_encode(std::span<const std::uint32_t> symbols, const ModelProvider& models);
std::vector<std::uint32_t> range_decode(std::span<const std::uint8_t> bytes,
                                        const ModelProvider& models, std::size_t count);

}  // namespace smolgs
