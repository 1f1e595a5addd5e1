#include "smolgs/range_coder.hpp"

#include <algorithm>
#include <string>

#include "smolgs/error.hpp"

namespace smolgs {

namespace {
constexpr std::uint32_t kTop = 1u << 24;
}

SymbolModel::SymbolModel(std::span<const std::uint32_t> frequencies) {
  if (frequencies.empty()) fail(ErrorCode::kInvalidValue, "symbol model has no symbols");
  cum_.reserve(frequencies.size() + 1);
  cum_.push_back(0);
  std::uint64_t total = 0;
  for (std::uint32_t f : frequencies) {
    if (f == 0) fail(ErrorCode::kInvalidValue, "symbol model has a zero frequency");
    total += f;
    if (total > kMaxTotalFrequency) {
      fail(ErrorCode::kInvalidValue, "symbol model total exceeds 2^16");
    }
    cum_.push_back(static_cast<std::uint32_t>(total));
  }
}

std::size_t SymbolModel::find(std::uint32_t target) const {
  auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
  return static_cast<std::size_t>(it - cum_.begin()) - 1;
}

void RangeEncoder::shift_low() {
  if (low_ < 0xFF000000ULL || low_ >= 0x100000000ULL) {
    const auto carry = static_cast<std::uint8_t>(low_ >> 32);
    std::uint8_t pending = cache_;
    do {
      out_.push_back(static_cast<std::uint8_t>(pending + carry));
      pending = 0xFF;
    } while (--cache_size_ != 0);
    cache_ = static_cast<std::uint8_t>(low_ >> 24);
  }
  ++cache_size_;
  low_ = (low_ & 0x00FFFFFFULL) << 8;
}

void RangeEncoder::encode(std::uint32_t symbol, const SymbolModel& model) {
  if (symbol >= model.size()) {
    fail(ErrorCode::kModelMismatch, "symbol " + std::to_string(symbol) +
                                        " outside model alphabet of size " +
                                        std::to_string(model.size()));
  }
  const std::uint64_t total = model.total();
  const std::uint64_t lo = static_cast<std::uint64_t>(range_) * model.cumulative(symbol) / total;
  const std::uint64_t hi =
      static_cast<std::uint64_t>(range_) * model.cumulative(symbol + 1) / total;
  low_ += lo;
  range_ = static_cast<std::uint32_t>(hi - lo);
  while (range_ < kTop) {
    range_ <<= 8;
    shift_low();
  }
}

Bytes RangeEncoder::finish() {
  for (int i = 0; i < 5; ++i) shift_low();
  return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> data) : data_(data) {
  if (data_.size() < 5) fail(ErrorCode::kCorruptStream, "range-coded stream shorter than 5 bytes");
  if (next_byte() != 0) fail(ErrorCode::kCorruptStream, "range-coded stream has a bad preamble");
  for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next_byte();
}

std::uint8_t RangeDecoder::next_byte() {
  if (pos_ >= data_.size()) fail(ErrorCode::kCorruptStream, "range-coded stream truncated");
  return data_[pos_++];
}

std::uint32_t RangeDecoder::decode(const SymbolModel& model) {
  const std::uint64_t total = model.total();
  if (total == 0) fail(ErrorCode::kModelMismatch, "empty symbol model");
  // Largest cumulative c with floor(range*c/T) <= code.
  const std::uint64_t target = ((static_cast<std::uint64_t>(code_) + 1) * total - 1) / range_;
  if (target >= total) fail(ErrorCode::kCorruptStream, "range-coded value outside the model");
  const std::size_t symbol = model.find(static_cast<std::uint32_t>(target));
  const std::uint64_t lo = static_cast<std::uint64_t>(range_) * model.cumulative(symbol) / total;
  const std::uint64_t hi =
      static_cast<std::uint64_t>(range_) * model.cumulative(symbol + 1) / total;
  code_ -= static_cast<std::uint32_t>(lo);
  range_ = static_cast<std::uint32_t>(hi - lo);
  while (range_ < kTop) {
    range_ <<= 8;
    code_ = (code_ << 8) | next_byte();
  }
  return static_cast<std::uint32_t>(symbol);
}

void RangeDecoder::expect_end() const {
  if (pos_ != data_.size()) {
    fail(ErrorCode::kCorruptStream,
         std::to_string(data_.size() - pos_) + " trailing range-coded bytes");
  }
}

Bytes range_encode(std::span<const std::uint32_t> symbols, const ModelProvider& models) {
  RangeEncoder enc;
  for (std::size_t i = 0; i < symbols.size(); ++i) enc.encode(symbols[i], models(i));
  return enc.finish();
}

std::vector<std::uint32_t> range_decode(std::span<const std::uint8_t> bytes,
                                        const ModelProvider& models, std::size_t count) {
  RangeDecoder dec(bytes);
  std::vector<std::uint32_t> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(dec.decode(models(i)));
  dec.expect_end();
  return out;
}

}  // namespace smolgs
