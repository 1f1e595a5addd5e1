#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "smolgs/range_coder.hpp"
#include "smolgs/types.hpp"

namespace smolgs {

/// Gaussian (mu, sigma) and quantization step for one channel.
struct ChannelParams {
  double mu = 0.0;
  double sigma = 1.0;
  double delta = 1.0;

  friend bool operator==(const ChannelParams&, const ChannelParams&) = default;
};

/// Per-channel parameters for one splat (or shared by all splats).
struct QuantParams {
  std::vector<ChannelParams> channels;

  /// Throws kInvalidValue if a value is non-finite or below its floor.
  void validate(double sigma_floor, double delta_floor) const;
  friend bool operator==(const QuantParams&, const QuantParams&) = default;
};

enum class ChannelRole : std::uint8_t { kFeature = 0, kScaling = 1 };

/// Integer symbols for n_splats x n_channels values (splat-major) and the
/// step sizes that produced them.
struct QuantizedBlock {
  ChannelRole role = ChannelRole::kFeature;
  std::size_t n_splats = 0;
  std::size_t n_channels = 0;
  std::vector<std::int64_t> symbols;
  std::vector<double> deltas;

  std::int64_t symbol(std::size_t splat, std::size_t channel) const {
    return symbols[splat * n_channels + channel];
  }
  double delta(std::size_t splat, std::size_t channel) const {
    return deltas[splat * n_channels + channel];
  }
  double dequantized(std::size_t splat, std::size_t channel) const {
    return static_cast<double>(symbol(splat, channel)) * delta(splat, channel);
  }
};

/// Round half to even, independent of the floating-point rounding mode.
double round_half_even(double v);

struct QuantizedValue {
  std::int64_t symbol;
  double reconstructed;
};

/// symbol = round_half_even(value / delta), reconstructed = symbol * delta.
/// Throws kInvalidValue for non-finite input or delta <= 0.
QuantizedValue quantize_value(double value, double delta);

struct QuantizedVector {
  std::vector<std::int64_t> symbols;
  std::vector<double> reconstructed;
};

QuantizedVector quantize(std::span<const double> values, std::span<const double> deltas);

/// Coding probability of the half-width bin [q*delta - delta/2, q*delta + delta/2],
/// floored at min_probability.
double bin_probability(std::int64_t symbol, const ChannelParams& params,
                       double min_probability);

/// The +-delta (width 2*delta) integral used for rate reporting only; bins
/// overlap, so these masses do not form a distribution.
double bin_probability_wide(std::int64_t symbol, const ChannelParams& params,
                            double min_probability);

struct RateReport {
  double nll_bits_total = 0.0;
  double nll_bits_per_splat = 0.0;
  double paper_nll_total = 0.0;
};

/// Sums -log2 of coding-bin probabilities over every symbol of the block.
/// `context` holds one QuantParams per splat, or a single shared entry.
RateReport rate_report(const QuantizedBlock& block, std::span<const QuantParams> context,
                       double min_probability);

/// Per-channel shared parameters fitted from data.
struct StaticContext {
  QuantParams features;
  QuantParams scaling;
};

/// mu = mean, sigma = max(stddev, sigma_floor),
/// delta = max((max - min) / target_bins, delta_floor), per channel.
StaticContext fit_static_context(const SplatCloud& cloud, const CodecConfig& config);

/// Inclusive symbol range [lo, hi] coded directly; other symbols escape.
struct SymbolRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::size_t width() const { return static_cast<std::size_t>(hi - lo + 1); }
  bool contains(std::int64_t s) const { return s >= lo && s <= hi; }
  friend bool operator==(const SymbolRange&, const SymbolRange&) = default;
};

/// mu/delta +- sigma_span*sigma/delta, recentred and clamped to at most
/// max_width symbols. Throws kLimitExceeded if the range leaves int32.
SymbolRange symbol_range(const ChannelParams& params, const CodecConfig& config);

/// 16-bit frequencies for the given probabilities followed by one escape
/// symbol: freq = max(1, floor(p * scale)) with scale <= 2^16 - 2 chosen so
/// that the total leaves the escape at least one count. The escape takes the
/// remainder, so the model total is exactly 2^16.
SymbolModel quantize_frequencies(std::span<const double> probabilities);

/// Model over `range` plus a trailing escape symbol (index range.width()).
SymbolModel symbols_to_model(const ChannelParams& params, const SymbolRange& range,
                             double min_probability);

/// A channel's coding model bundled with its alphabet.
struct ChannelModel {
  SymbolRange range;
  SymbolModel model;

  std::size_t escape_symbol() const { return range.width(); }
  friend bool operator==(const ChannelModel&, const ChannelModel&) = default;
};

ChannelModel make_channel_model(const ChannelParams& params, const CodecConfig& config);

/// Range-coded values of one chunk. Escaped symbols are coded as the escape
/// index and their raw int32 values appended to `escapes` in coding order.
struct CodedChunk {
  std::uint32_t symbol_count = 0;
  Bytes payload;
  std::vector<std::int32_t> escapes;

  std::size_t coded_bytes() const { return payload.size() + 4 * escapes.size(); }
};

using ChannelModelProvider =
    std::function<const ChannelModel&(std::size_t splat, std::size_t channel)>;

/// Codes block rows [begin, end) in splat-major order.
CodedChunk encode_chunk(const QuantizedBlock& block, std::size_t begin, std::size_t end,
                        const ChannelModelProvider& models);

/// Inverse of encode_chunk; writes symbols into block rows [begin, end).
void decode_chunk(const CodedChunk& chunk, QuantizedBlock& block, std::size_t begin,
                  std::size_t end, const ChannelModelProvider& models);

}  // namespace smolgs
