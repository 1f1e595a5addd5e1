#include "smolgs/zip_export.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <limits>

#include "smolgs/container.hpp"
#include "smolgs/error.hpp"

namespace smolgs {

namespace {

constexpr std::uint16_t kMethodStored = 0;
constexpr std::uint16_t kMethodDeflate = 8;
constexpr std::uint16_t kDosDate = (0 << 9) | (1 << 5) | 1;  // 1980-01-01

Bytes raw_deflate(std::span<const std::uint8_t> data) {
  z_stream zs{};
  if (deflateInit2(&zs, 9, Z_DEFLATED, -15, 9, Z_DEFAULT_STRATEGY) != Z_OK) {
    fail(ErrorCode::kIoError, "deflateInit2 failed");
  }
  Bytes out(deflateBound(&zs, static_cast<uLong>(data.size())));
  zs.next_in = const_cast<Bytef*>(data.data());
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  out.resize(zs.total_out);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) fail(ErrorCode::kIoError, "deflate failed");
  return out;
}

}  // namespace

Bytes write_zip(const std::vector<ZipEntry>& entries) {
  ByteWriter w;
  ByteWriter central;
  for (const ZipEntry& e : entries) {
    if (e.data.size() >= std::numeric_limits<std::uint32_t>::max() ||
        w.size() >= std::numeric_limits<std::uint32_t>::max()) {
      fail(ErrorCode::kLimitExceeded, "zip entries above 4 GiB need zip64");
    }
    const std::uint32_t crc = crc32(e.data);
    Bytes deflated = raw_deflate(e.data);
    const bool store = deflated.size() >= e.data.size();
    const std::span<const std::uint8_t> body = store ? e.data : std::span<const std::uint8_t>(deflated);
    const std::uint16_t method = store ? kMethodStored : kMethodDeflate;
    const auto offset = static_cast<std::uint32_t>(w.size());

    w.u32(0x04034b50);
    w.u16(20);
    w.u16(0);
    w.u16(method);
    w.u16(0);
    w.u16(kDosDate);
    w.u32(crc);
    w.u32(static_cast<std::uint32_t>(body.size()));
    w.u32(static_cast<std::uint32_t>(e.data.size()));
    w.u16(static_cast<std::uint16_t>(e.name.size()));
    w.u16(0);
    w.str(e.name);
    w.bytes(body);

    central.u32(0x02014b50);
    central.u16(20);
    central.u16(20);
    central.u16(0);
    central.u16(method);
    central.u16(0);
    central.u16(kDosDate);
    central.u32(crc);
    central.u32(static_cast<std::uint32_t>(body.size()));
    central.u32(static_cast<std::uint32_t>(e.data.size()));
    central.u16(static_cast<std::uint16_t>(e.name.size()));
    central.u16(0);
    central.u16(0);
    central.u16(0);
    central.u16(0);
    central.u32(0);
    central.u32(offset);
    central.str(e.name);
  }
  const auto central_offset = static_cast<std::uint32_t>(w.size());
  const auto central_size = static_cast<std::uint32_t>(central.size());
  w.bytes(central.buffer());
  w.u32(0x06054b50);
  w.u16(0);
  w.u16(0);
  w.u16(static_cast<std::uint16_t>(entries.size()));
  w.u16(static_cast<std::uint16_t>(entries.size()));
  w.u32(central_size);
  w.u32(central_offset);
  w.u16(0);
  return w.take();
}

Bytes container_zip(std::span<const std::uint8_t> container) {
  const ContainerHeader header = read_header(container);
  std::vector<std::string> names;
  std::vector<ZipEntry> entries;
  entries.push_back({"header.bin", container.first(header.header_size)});
  for (const auto& [id, payload] : section_payloads(container)) {
    std::string name = section_name(id);
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    entries.push_back({name + ".bin", payload});
  }
  return write_zip(entries);
}

}  // namespace smolgs
