#include <gtest/gtest.h>
#include <zlib.h>

#include <map>

#include "smolgs/container.hpp"
#include "smolgs/zip_export.hpp"
#include "unit/test_util.hpp"

namespace smolgs {
namespace {

std::uint32_t le(const Bytes& b, std::size_t at, int n) {
  std::uint32_t v = 0;
  for (int i = 0; i < n; ++i) v |= static_cast<std::uint32_t>(b[at + i]) << (8 * i);
  return v;
}

// Walks the local file headers and inflates every entry with zlib.
std::map<std::string, Bytes> unzip(const Bytes& zip) {
  std::map<std::string, Bytes> out;
  std::size_t at = 0;
  while (le(zip, at, 4) == 0x04034b50u) {
    const std::uint32_t method = le(zip, at + 8, 2);
    const std::uint32_t crc = le(zip, at + 14, 4);
    const std::uint32_t csize = le(zip, at + 18, 4);
    const std::uint32_t usize = le(zip, at + 22, 4);
    const std::uint32_t nlen = le(zip, at + 26, 2);
    const std::uint32_t xlen = le(zip, at + 28, 2);
    const std::string name(zip.begin() + at + 30, zip.begin() + at + 30 + nlen);
    const std::uint8_t* data = zip.data() + at + 30 + nlen + xlen;
    Bytes plain(usize);
    if (method == 0) {
      EXPECT_EQ(csize, usize);
      std::copy(data, data + csize, plain.begin());
    } else {
      EXPECT_EQ(method, 8u);
      z_stream z{};
      inflateInit2(&z, -15);
      z.next_in = const_cast<Bytef*>(data);
      z.avail_in = csize;
      z.next_out = plain.data();
      z.avail_out = usize;
      EXPECT_EQ(inflate(&z, Z_FINISH), Z_STREAM_END);
      EXPECT_EQ(z.total_out, usize);
      inflateEnd(&z);
    }
    EXPECT_EQ(::crc32(0, plain.data(), usize), crc);
    out[name] = plain;
    at += 30 + nlen + xlen + csize;
  }
  EXPECT_EQ(le(zip, at, 4), 0x02014b50u);  // central directory follows
  EXPECT_EQ(le(zip, zip.size() - 22, 4), 0x06054b50u);
  EXPECT_EQ(le(zip, zip.size() - 22 + 10, 2), out.size());
  return out;
}

TEST(Zip, EntriesInflateToTheirInput) {
  const Bytes zeros(5000, 0);
  Bytes noise(300);
  SplitMix64 rng(1);
  for (auto& b : noise) b = static_cast<std::uint8_t>(rng.next());
  const Bytes zip = write_zip({{"zeros.bin", zeros}, {"noise.bin", noise}, {"empty", {}}});
  const auto files = unzip(zip);
  ASSERT_EQ(files.size(), 3u);
  EXPECT_EQ(files.at("zeros.bin"), zeros);
  EXPECT_EQ(files.at("noise.bin"), noise);
  EXPECT_TRUE(files.at("empty").empty());
  EXPECT_LT(zip.size(), 1000u);
}

TEST(Zip, ContainerArchiveHoldsEverySection) {
  CodecConfig cfg;
  cfg.n_f = 3;
  const Bytes c = encode_container(testing::random_cloud(1000, 3, 2), cfg, ContextMode::kStatic);
  const Bytes zip = container_zip(c);
  EXPECT_EQ(zip, container_zip(c));
  const auto files = unzip(zip);
  ASSERT_EQ(files.size(), 6u);
  const ContainerHeader h = read_header(c);
  EXPECT_EQ(files.at("header.bin"), Bytes(c.begin(), c.begin() + h.header_size));
  std::size_t total = 0;
  for (const auto& [name, data] : files) total += data.size();
  EXPECT_EQ(total, c.size());
  const SectionEntry& f = h.section(SectionId::kFeatures);
  EXPECT_EQ(files.at("features.bin"), Bytes(c.begin() + f.offset, c.begin() + f.offset + f.length));
}

}  // namespace
}  // namespace smolgs
