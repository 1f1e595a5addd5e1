#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <set>

#include "smolgs/error.hpp"
#include "smolgs/fixtures.hpp"
#include "smolgs/morton.hpp"
#include "smolgs/octree.hpp"
#include "unit/test_util.hpp"

namespace smolgs {
namespace {

SplatCloud cloud_from(std::vector<Vec3> points, BoundingBox box) {
  SplatCloud c;
  c.n_f = 1;
  c.bbox = box;
  for (const Vec3& p : points) c.splats.push_back({p, {0.0}, {}});
  return c;
}

std::vector<GridIndex> sorted_unique_indices(const SplatCloud& c, int R) {
  std::set<std::uint64_t> codes;
  for (const Splat& s : c.splats) codes.insert(morton_encode(quantize_coordinate(s.x, c.bbox, R), R));
  std::vector<GridIndex> out;
  for (auto code : codes) out.push_back(morton_decode(code, R));
  return out;
}

// Counts nodes per level from the leaf set alone.
std::vector<std::array<std::uint64_t, 9>> recount_popcounts(const std::vector<std::uint64_t>& leaves,
                                                            int R) {
  std::vector<std::array<std::uint64_t, 9>> hist(static_cast<std::size_t>(R));
  for (int level = 0; level < R; ++level) {
    std::map<std::uint64_t, std::uint8_t> nodes;
    const int shift = 3 * (R - level - 1);
    for (auto code : leaves) {
      nodes[code >> (shift + 3)] |= static_cast<std::uint8_t>(1u << ((code >> shift) & 7u));
    }
    for (const auto& [prefix, byte] : nodes) ++hist[level][std::popcount(byte)];
  }
  return hist;
}

const BoundingBox kUnit{{0, 0, 0}, {1, 1, 1}};

TEST(Octree, SingleSplatSinglePath) {
  const OctreeBuild b = build_octree(cloud_from({{0.3, 0.6, 0.9}}, kUnit), 2);
  ASSERT_EQ(b.stream.occupancy_bytes.size(), 2u);
  for (auto byte : b.stream.occupancy_bytes) EXPECT_EQ(std::popcount(byte), 1);
  EXPECT_EQ(b.stream.leaf_count, 1u);
}

TEST(Octree, OppositeCornersAtDepthOne) {
  const OctreeBuild b = build_octree(cloud_from({{0.1, 0.1, 0.1}, {0.9, 0.9, 0.9}}, kUnit), 1);
  ASSERT_EQ(b.stream.occupancy_bytes.size(), 1u);
  EXPECT_EQ(b.stream.occupancy_bytes[0], 0b10000001);
}

TEST(Octree, DecodeHandBuiltStreams) {
  OctreeStream s{kUnit, 2, {0x01, 0x01}, 1};
  EXPECT_EQ(decode_octree(s), (std::vector<GridIndex>{{0, 0, 0}}));
  OctreeStream full{kUnit, 1, {0xFF}, 8};
  const auto cells = decode_octree(full);
  ASSERT_EQ(cells.size(), 8u);
  for (std::uint32_t j = 0; j < 8; ++j) {
    EXPECT_EQ(cells[j], (GridIndex{j & 1u, (j >> 1) & 1u, j >> 2}));
  }
}

TEST(Octree, DecodeRejectsMalformedStreams) {
  const auto code_of = [](const OctreeStream& s) {
    try {
      decode_octree(s);
    } catch (const CodecError& e) {
      return e.code();
    }
    return ErrorCode::kIoError;
  };
  EXPECT_EQ(code_of({kUnit, 2, {0x01}, 1}), ErrorCode::kCorruptStream);              // truncated
  EXPECT_EQ(code_of({kUnit, 2, {0x01, 0x01, 0x01}, 1}), ErrorCode::kCorruptStream);  // trailing
  EXPECT_EQ(code_of({kUnit, 2, {0x01, 0x00}, 1}), ErrorCode::kCorruptStream);        // zero byte
  EXPECT_EQ(code_of({kUnit, 2, {0x01, 0x03}, 1}), ErrorCode::kCorruptStream);        // count
}

TEST(Octree, SphereSetEqualityAtDepthTen) {
  const SplatCloud c = make_fixture(FixtureKind::kSphere, 10000, 2, 1).cloud;
  const OctreeBuild b = build_octree(c, 10);
  EXPECT_EQ(decode_octree(b.stream), sorted_unique_indices(c, 10));
}

TEST(Octree, RoundTripRandomCloudsAndInvariants) {
  for (int trial = 0; trial < 24; ++trial) {
    const int R = 4 + 4 * (trial % 4);
    const SplatCloud c = testing::random_cloud(50 + 97 * trial, 1, 100 + trial);
    const OctreeBuild b = build_octree(c, R);
    const auto expected = sorted_unique_indices(c, R);
    ASSERT_EQ(decode_octree(b.stream), expected);
    EXPECT_EQ(b.stream.leaf_count, expected.size());
    // No zero bytes; set bits at a level count the nodes of the next one.
    const auto hist = recount_popcounts(b.leaf_codes, R);
    std::size_t bytes = 0;
    for (int l = 0; l < R; ++l) {
      std::uint64_t nodes = 0, bits = 0;
      for (int k = 0; k < 9; ++k) {
        nodes += hist[l][k];
        bits += k * hist[l][k];
      }
      EXPECT_EQ(hist[l][0], 0u);
      bytes += nodes;
      if (l + 1 < R) {
        std::uint64_t next = 0;
        for (int k = 0; k < 9; ++k) next += hist[l + 1][k];
        EXPECT_EQ(bits, next);
      } else {
        EXPECT_EQ(bits, b.stream.leaf_count);
      }
    }
    EXPECT_EQ(b.stream.occupancy_bytes.size(), bytes);
    for (auto byte : b.stream.occupancy_bytes) EXPECT_NE(byte, 0);
  }
}

TEST(Octree, CanonicalOrderAndMergeGroups) {
  // Two splats share a leaf at R = 1; the other two are alone.
  SplatCloud c = cloud_from({{0.9, 0.9, 0.9}, {0.1, 0.1, 0.1}, {0.2, 0.2, 0.2}, {0.9, 0.1, 0.1}}, kUnit);
  c.splats[1].f = {1.0};
  c.splats[2].f = {4.0};
  c.splats[1].s = {1, 2, 3};
  c.splats[2].s = {3, 4, 5};
  const OctreeBuild b = build_octree(c, 1);
  EXPECT_EQ(b.leaf_codes, (std::vector<std::uint64_t>{0, 1, 7}));
  EXPECT_EQ(b.canonical_order, (std::vector<std::size_t>{1, 3, 0}));
  EXPECT_EQ(b.merge_groups[0], (std::vector<std::size_t>{1, 2}));
  const SplatCloud m = merge_leaf_groups(c, b);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m.splats[0].f[0], 2.5);
  EXPECT_EQ(m.splats[0].s, (Vec3{2, 3, 4}));
  EXPECT_EQ(m.splats[0].x, (Vec3{0.25, 0.25, 0.25}));
}

TEST(Octree, LeafRatioNondecreasingInDepth) {
  const SplatCloud c = make_fixture(FixtureKind::kGaussianMixture, 3000, 1, 4).cloud;
  std::size_t prev = 0;
  for (int R = 1; R <= 21; ++R) {
    const std::size_t leaves = build_octree(c, R).stream.leaf_count;
    EXPECT_GE(leaves, prev);
    prev = leaves;
  }
  EXPECT_EQ(prev, c.size());
}

TEST(OccupancyStatistics, MatchesRecount) {
  const SplatCloud c = make_fixture(FixtureKind::kSphere, 10000, 1, 2).cloud;
  const OctreeBuild b = build_octree(c, 12);
  const OccupancyStatistics st = occupancy_statistics(b.stream);
  EXPECT_EQ(st.popcount_per_level, recount_popcounts(b.leaf_codes, 12));
  std::array<std::uint64_t, 256> freq{};
  for (auto byte : b.stream.occupancy_bytes) ++freq[byte];
  EXPECT_EQ(st.byte_frequency, freq);
}

TEST(OccupancyStatistics, TrivialStreams) {
  const OctreeBuild one = build_octree(cloud_from({{0.5, 0.5, 0.5}}, kUnit), 6);
  for (const auto& h : occupancy_statistics(one.stream).popcount_per_level) {
    EXPECT_EQ(h[1], 1u);
    EXPECT_EQ(h[1], std::accumulate(h.begin(), h.end(), std::uint64_t{0}));
  }
  const OccupancyStatistics full = occupancy_statistics({kUnit, 1, {0xFF}, 8});
  EXPECT_EQ(full.popcount_per_level[0][8], 1u);
  EXPECT_DOUBLE_EQ(full.mean_popcount(0), 8.0);
}

}  // namespace
}  // namespace smolgs
