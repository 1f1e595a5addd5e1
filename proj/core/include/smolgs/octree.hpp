#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "smolgs/morton.hpp"
#include "smolgs/types.hpp"

namespace smolgs {

/// Breadth-first occupancy bytes of a sparse octree of depth R. Level 0 is
/// the root; within a level nodes follow ascending Morton order of their
/// path prefix. Bit j of a byte is set iff child j (z<<2|y<<1|x) is
/// non-empty.
struct OctreeStream {
  BoundingBox bbox;
  int depth = 16;
  std::vector<std::uint8_t> occupancy_bytes;
  std::uint64_t leaf_count = 0;
};

struct OctreeBuild {
  OctreeStream stream;
  // One representative (the lowest original index) per leaf, ascending Morton.
  std::vector<std::size_t> canonical_order;
  // For each leaf, every original splat index that quantized into it.
  std::vector<std::vector<std::size_t>> merge_groups;
  // Sorted distinct leaf Morton codes, parallel to canonical_order.
  std::vector<std::uint64_t> leaf_codes;
};

OctreeBuild build_octree(const SplatCloud& cloud, int depth);

/// Occupancy bytes for an already sorted, duplicate-free list of leaf codes.
std::vector<std::uint8_t> occupancy_from_codes(const std::vector<std::uint64_t>& sorted_codes,
                                               int depth);

/// Leaf Morton codes in ascending order. Throws kCorruptStream on truncation,
/// trailing bytes, zero bytes or a leaf_count mismatch.
std::vector<std::uint64_t> decode_octree_codes(const OctreeStream& stream);
std::vector<GridIndex> decode_octree(const OctreeStream& stream);

/// Splats of one cloud averaged per leaf (feature and scaling means),
/// positioned at the leaf centers, in canonical order.
SplatCloud merge_leaf_groups(const SplatCloud& cloud, const OctreeBuild& build);

struct OccupancyStatistics {
  // popcount_per_level[level][k] = number of bytes at level with popcount k.
  std::vector<std::array<std::uint64_t, 9>> popcount_per_level;
  std::array<std::uint64_t, 256> byte_frequency{};

  double mean_popcount(std::size_t level) const;
};

OccupancyStatistics occupancy_statistics(const OctreeStream& stream);

}  // namespace smolgs
