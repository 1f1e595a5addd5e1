#pragma once

#include <cstdint>

#include "smolgs/types.hpp"

namespace smolgs {

/// Cell index on the 2^R grid; each component is < 2^R.
struct GridIndex {
  std::uint32_t ix = 0;
  std::uint32_t iy = 0;
  std::uint32_t iz = 0;

  friend bool operator==(const GridIndex&, const GridIndex&) = default;
  friend auto operator<=>(const GridIndex&, const GridIndex&) = default;
};

/// Smallest box around `box` whose cell centres at depth R, and half the cell
/// width, are exact doubles: min, max and the cell width are integer multiples
/// of one power of two. Grows each axis by a few ulps of its magnitude.
BoundingBox grid_bounding_box(const BoundingBox& box, int depth);

// Cell index = floor((x - min) / (extent / 2^R)), clamped to 2^R - 1.
GridIndex quantize_coordinate(const Vec3& x, const BoundingBox& bbox, int depth);

// Leaf-cell center for an index.
Vec3 dequantize_index(const GridIndex& index, const BoundingBox& bbox, int depth);

/// Interleaves bit k of (ix, iy, iz) into bits (3k, 3k+1, 3k+2), so the
/// child number of a node is the 3-bit group z<<2 | y<<1 | x.
std::uint64_t morton_encode(const GridIndex& index, int depth);

/// Inverse of morton_encode. Throws kInvalidCode for code >= 2^(3*depth).
GridIndex morton_decode(std::uint64_t code, int depth);

}  // namespace smolgs
