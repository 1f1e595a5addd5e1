#include "smolgs/feature_codec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "smolgs/detmath.hpp"
#include "smolgs/error.hpp"

namespace smolgs {

namespace {

constexpr double kInt32Max = 2147483647.0;
constexpr double kInt32Min = -2147483648.0;

double neg_log2(double p) { return -std::log2(p); }

ChannelParams with_delta(const ChannelParams& p, double delta) {
  return {p.mu, p.sigma, delta};
}

}  // namespace

void QuantParams::validate(double sigma_floor, double delta_floor) const {
  for (std::size_t c = 0; c < channels.size(); ++c) {
    const ChannelParams& p = channels[c];
    if (!std::isfinite(p.mu) || !std::isfinite(p.sigma) || !std::isfinite(p.delta)) {
      fail(ErrorCode::kInvalidValue, "channel " + std::to_string(c) + " has non-finite params");
    }
    if (p.sigma < sigma_floor || p.delta < delta_floor) {
      fail(ErrorCode::kInvalidValue, "channel " + std::to_string(c) + " is below its floor");
    }
  }
}

double round_half_even(double v) {
  const double r = std::round(v);  // half away from zero
  if (std::fabs(v - std::trunc(v)) == 0.5) return 2.0 * std::round(v * 0.5);
  return r;
}

QuantizedValue quantize_value(double value, double delta) {
  if (!std::isfinite(value) || !std::isfinite(delta) || !(delta > 0)) {
    fail(ErrorCode::kInvalidValue, "cannot quantize a non-finite value or step");
  }
  double q = round_half_even(value / delta);
  if (std::fabs(q) > 9.0e15) fail(ErrorCode::kLimitExceeded, "quantized symbol out of range");
  // The division rounds; settle the bin on the exactly rounded residual.
  const double residual = std::fma(-q, delta, value);
  const double half = 0.5 * delta;
  if (residual > half) {
    q += 1.0;
  } else if (residual < -half) {
    q -= 1.0;
  } else if (std::fabs(residual) == half && std::fmod(q, 2.0) != 0.0) {
    q += residual > 0 ? 1.0 : -1.0;
  }
  return {static_cast<std::int64_t>(q), q * delta};
}

QuantizedVector quantize(std::span<const double> values, std::span<const double> deltas) {
  if (values.size() != deltas.size()) {
    fail(ErrorCode::kShapeError, "values and deltas differ in length");
  }
  QuantizedVector out;
  out.symbols.reserve(values.size());
  out.reconstructed.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto q = quantize_value(values[i], deltas[i]);
    out.symbols.push_back(q.symbol);
    out.reconstructed.push_back(q.reconstructed);
  }
  return out;
}

double bin_probability(std::int64_t symbol, const ChannelParams& params,
                       double min_probability) {
  const double center = static_cast<double>(symbol) * params.delta;
  const double half = 0.5 * params.delta;
  const double p = detmath::normal_interval(center - half, center + half, params.mu, params.sigma);
  return std::max(p, min_probability);
}

double bin_probability_wide(std::int64_t symbol, const ChannelParams& params,
                            double min_probability) {
  const double center = static_cast<double>(symbol) * params.delta;
  const double p = detmath::normal_interval(center - params.delta, center + params.delta,
                                            params.mu, params.sigma);
  return std::max(p, min_probability);
}

RateReport rate_report(const QuantizedBlock& block, std::span<const QuantParams> context,
                       double min_probability) {
  RateReport report;
  if (block.n_splats == 0) return report;
  if (context.size() != 1 && context.size() != block.n_splats) {
    fail(ErrorCode::kShapeError, "context must be shared or cover every splat");
  }
  for (std::size_t i = 0; i < block.n_splats; ++i) {
    const QuantParams& params = context.size() == 1 ? context[0] : context[i];
    if (params.channels.size() != block.n_channels) {
      fail(ErrorCode::kShapeError, "context channel count does not match the block");
    }
    for (std::size_t c = 0; c < block.n_channels; ++c) {
      const ChannelParams p = with_delta(params.channels[c], block.delta(i, c));
      report.nll_bits_total += neg_log2(bin_probability(block.symbol(i, c), p, min_probability));
      report.paper_nll_total +=
          neg_log2(bin_probability_wide(block.symbol(i, c), p, min_probability));
    }
  }
  report.nll_bits_per_splat = report.nll_bits_total / static_cast<double>(block.n_splats);
  return report;
}

StaticContext fit_static_context(const SplatCloud& cloud, const CodecConfig& config) {
  if (cloud.empty()) fail(ErrorCode::kEmptyCloud, "cannot fit a context to an empty cloud");
  const std::size_t n = cloud.size();
  auto fit = [&](auto&& value_of, std::size_t channels) {
    QuantParams params;
    for (std::size_t c = 0; c < channels; ++c) {
      double sum = 0.0;
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (const Splat& s : cloud.splats) {
        const double v = value_of(s, c);
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      const double mean = sum / static_cast<double>(n);
      double sq = 0.0;
      for (const Splat& s : cloud.splats) {
        const double d = value_of(s, c) - mean;
        sq += d * d;
      }
      const double stddev = std::sqrt(sq / static_cast<double>(n));
      params.channels.push_back(
          {mean, std::max(stddev, config.sigma_floor),
           std::max((hi - lo) / static_cast<double>(config.target_bins), config.delta_floor)});
    }
    return params;
  };
  StaticContext ctx;
  ctx.features = fit([](const Splat& s, std::size_t c) { return s.f[c]; },
                     static_cast<std::size_t>(cloud.n_f));
  ctx.scaling = fit([](const Splat& s, std::size_t c) { return s.s[c]; }, 3);
  return ctx;
}

SymbolRange symbol_range(const ChannelParams& params, const CodecConfig& config) {
  const double center = params.mu / params.delta;
  const double span = config.sigma_span * params.sigma / params.delta;
  if (!std::isfinite(center) || !std::isfinite(span) || center > kInt32Max ||
      center < kInt32Min) {
    fail(ErrorCode::kLimitExceeded, "symbol range centre does not fit in 32 bits");
  }
  const auto max_width = static_cast<double>(config.max_symbol_width);
  double lo = std::floor(center - span);
  double hi = std::ceil(center + span);
  if (hi - lo + 1.0 > max_width) {
    lo = round_half_even(center) - std::floor(max_width / 2.0);
    hi = lo + max_width - 1.0;
  }
  if (lo < kInt32Min || hi > kInt32Max) {
    fail(ErrorCode::kLimitExceeded, "symbol range does not fit in 32 bits");
  }
  return {static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi)};
}

SymbolModel quantize_frequencies(std::span<const double> probabilities) {
  constexpr auto kTotal = static_cast<double>(kMaxTotalFrequency);
  const std::size_t n = probabilities.size();
  if (n == 0 || n + 1 > kMaxTotalFrequency) {
    fail(ErrorCode::kInvalidValue, "symbol alphabet size out of range");
  }
  double mass = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0) || !std::isfinite(p)) fail(ErrorCode::kInvalidValue, "invalid probability");
    mass += p;
  }
  double scale = (kTotal - 2.0) / std::max(1.0, mass);
  std::vector<std::uint32_t> freq(n + 1);
  for (;;) {
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double f = std::floor(probabilities[i] * scale);
      freq[i] = f < 1.0 ? 1u : static_cast<std::uint32_t>(f);
      total += freq[i];
    }
    if (total <= kMaxTotalFrequency - 1) {
      freq[n] = static_cast<std::uint32_t>(kMaxTotalFrequency - total);
      return SymbolModel(freq);
    }
    scale *= (kTotal - 1.0) / static_cast<double>(total) * 0.9999;
  }
}

SymbolModel symbols_to_model(const ChannelParams& params, const SymbolRange& range,
                             double min_probability) {
  std::vector<double> probs(range.width());
  for (std::size_t k = 0; k < probs.size(); ++k) {
    probs[k] = bin_probability(range.lo + static_cast<std::int64_t>(k), params, min_probability);
  }
  return quantize_frequencies(probs);
}

ChannelModel make_channel_model(const ChannelParams& params, const CodecConfig& config) {
  ChannelModel m;
  m.range = symbol_range(params, config);
  m.model = symbols_to_model(params, m.range, config.min_bin_probability);
  return m;
}

CodedChunk encode_chunk(const QuantizedBlock& block, std::size_t begin, std::size_t end,
                        const ChannelModelProvider& models) {
  CodedChunk chunk;
  const std::size_t count = (end - begin) * block.n_channels;
  if (count > std::numeric_limits<std::uint32_t>::max()) {
    fail(ErrorCode::kLimitExceeded, "chunk holds more than 2^32 symbols");
  }
  chunk.symbol_count = static_cast<std::uint32_t>(count);
  RangeEncoder enc;
  for (std::size_t i = begin; i < end; ++i) {
    for (std::size_t c = 0; c < block.n_channels; ++c) {
      const ChannelModel& m = models(i, c);
      const std::int64_t s = block.symbol(i, c);
      if (m.range.contains(s)) {
        enc.encode(static_cast<std::uint32_t>(s - m.range.lo), m.model);
      } else {
        if (s < std::numeric_limits<std::int32_t>::min() ||
            s > std::numeric_limits<std::int32_t>::max()) {
          fail(ErrorCode::kLimitExceeded, "escaped symbol does not fit in 32 bits");
        }
        enc.encode(static_cast<std::uint32_t>(m.escape_symbol()), m.model);
        chunk.escapes.push_back(static_cast<std::int32_t>(s));
      }
    }
  }
  chunk.payload = enc.finish();
  return chunk;
}

void decode_chunk(const CodedChunk& chunk, QuantizedBlock& block, std::size_t begin,
                  std::size_t end, const ChannelModelProvider& models) {
  if (chunk.symbol_count != (end - begin) * block.n_channels) {
    fail(ErrorCode::kCorruptStream, "chunk symbol count does not match its rows");
  }
  RangeDecoder dec(chunk.payload);
  std::size_t next_escape = 0;
  for (std::size_t i = begin; i < end; ++i) {
    for (std::size_t c = 0; c < block.n_channels; ++c) {
      const ChannelModel& m = models(i, c);
      const std::uint32_t s = dec.decode(m.model);
      std::int64_t value;
      if (s == m.escape_symbol()) {
        if (next_escape >= chunk.escapes.size()) {
          fail(ErrorCode::kCorruptStream, "escape payloads exhausted");
        }
        value = chunk.escapes[next_escape++];
        if (m.range.contains(value)) {
          fail(ErrorCode::kCorruptStream, "escaped symbol lies inside the coded range");
        }
      } else {
        value = m.range.lo + static_cast<std::int64_t>(s);
      }
      block.symbols[i * block.n_channels + c] = value;
    }
  }
  dec.expect_end();
  if (next_escape != chunk.escapes.size()) {
    fail(ErrorCode::kCorruptStream, "unused escape payloads");
  }
}

}  // namespace smolgs
