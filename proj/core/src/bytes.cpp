#include "smolgs/bytes.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>

#include "smolgs/error.hpp"

namespace smolgs {

std::uint32_t crc32(std::span<const std::uint8_t> data) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in slices.
  constexpr std::size_t kSlice = 1u << 30;
  for (std::size_t off = 0; off < data.size(); off += kSlice) {
    const std::size_t n = std::min(kSlice, data.size() - off);
    crc = ::crc32(crc, data.data() + off, static_cast<uInt>(n));
  }
  return static_cast<std::uint32_t>(crc);
}

void ByteWriter::f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
void ByteWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void ByteReader::need(std::size_t n) const {
  if (n > remaining()) {
    fail(ErrorCode::kCorruptStream, context_ + ": unexpected end of data at offset " +
                                        std::to_string(pos_) + " (need " + std::to_string(n) +
                                        " bytes, have " + std::to_string(remaining()) + ")");
  }
}

std::uint8_t ByteReader::u8() {
  need(1);
  return data_[pos_++];
}

std::uint64_t ByteReader::get_le(int n) {
  need(static_cast<std::size_t>(n));
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
  pos_ += static_cast<std::size_t>(n);
  return v;
}

float ByteReader::f32() { return std::bit_cast<float>(u32()); }
double ByteReader::f64() { return std::bit_cast<double>(u64()); }

std::span<const std::uint8_t> ByteReader::bytes(std::size_t n) {
  need(n);
  auto out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::string ByteReader::str(std::size_t n) {
  auto b = bytes(n);
  return std::string(b.begin(), b.end());
}

void ByteReader::expect_end() const {
  if (!at_end()) {
    fail(ErrorCode::kCorruptStream,
         context_ + ": " + std::to_string(remaining()) + " trailing bytes");
  }
}

void BitWriter::put(std::uint64_t code, int length) {
  for (int i = length - 1; i >= 0; --i) {
    if ((bits_ & 7u) == 0) buf_.push_back(0);
    if ((code >> i) & 1u) buf_.back() |= static_cast<std::uint8_t>(0x80u >> (bits_ & 7u));
    ++bits_;
  }
}

unsigned BitReader::get() {
  if (pos_ >= bit_count_) fail(ErrorCode::kCorruptStream, "bit stream underrun");
  const unsigned bit = (data_[pos_ >> 3] >> (7 - (pos_ & 7u))) & 1u;
  ++pos_;
  return bit;
}

}  // namespace smolgs
