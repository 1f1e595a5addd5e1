#include "smolgs/morton.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "smolgs/error.hpp"

namespace smolgs {

namespace {

void check_depth(int depth) {
  if (depth < 1 || depth > kMaxRecursionDepth) {
    fail(ErrorCode::kInvalidConfig, "recursion depth must be in [1, 21], got " +
                                        std::to_string(depth));
  }
}

// Spreads the low 21 bits of v so that bit k lands on bit 3k.
std::uint64_t spread_bits(std::uint64_t v) {
  v &= 0x1fffffULL;
  v = (v | (v << 32)) & 0x001f00000000ffffULL;
  v = (v | (v << 16)) & 0x001f0000ff0000ffULL;
  v = (v | (v << 8)) & 0x100f00f00f00f00fULL;
  v = (v | (v << 4)) & 0x10c30c30c30c30c3ULL;
  v = (v | (v << 2)) & 0x1249249249249249ULL;
  return v;
}

std::uint32_t compact_bits(std::uint64_t v) {
  v &= 0x1249249249249249ULL;
  v = (v ^ (v >> 2)) & 0x10c30c30c30c30c3ULL;
  v = (v ^ (v >> 4)) & 0x100f00f00f00f00fULL;
  v = (v ^ (v >> 8)) & 0x001f0000ff0000ffULL;
  v = (v ^ (v >> 16)) & 0x001f00000000ffffULL;
  v = (v ^ (v >> 32)) & 0x1fffffULL;
  return static_cast<std::uint32_t>(v);
}

}  // namespace

BoundingBox grid_bounding_box(const BoundingBox& box, int depth) {
  check_depth(depth);
  box.validate();
  BoundingBox out;
  for (std::size_t k = 0; k < 3; ++k) {
    const double lo = box.min[k];
    const double hi = box.max[k];
    int e = 0;
    std::frexp(std::max(std::fabs(lo), std::fabs(hi)) + (hi - lo), &e);
    // Everything below is an integer count of q; the counts stay under 2^53.
    const double q = std::ldexp(1.0, e - 50);
    const double m = std::floor(lo / q);
    double c = std::ceil((hi - lo) / std::ldexp(q, depth)) + 1.0;
    if (std::fmod(c, 2.0) != 0.0) c += 1.0;
    out.min[k] = m * q;
    out.max[k] = (m + std::ldexp(c, depth)) * q;
  }
  return out;
}

GridIndex quantize_coordinate(const Vec3& x, const BoundingBox& bbox, int depth) {
  check_depth(depth);
  if (!bbox.contains(x)) {
    fail(ErrorCode::kOutOfBounds, "coordinate lies outside the bounding box");
  }
  const double cells = std::ldexp(1.0, depth);
  const auto last = static_cast<std::uint32_t>((1ULL << depth) - 1);
  std::uint32_t out[3];
  for (std::size_t k = 0; k < 3; ++k) {
    const double cell = bbox.extent(k) / cells;
    const double t = std::floor((x[k] - bbox.min[k]) / cell);
    std::uint32_t i = t >= static_cast<double>(last) ? last : static_cast<std::uint32_t>(t);
    // The division can round across a cell face. Compare against the centre
    // with an error-free difference (x - c = diff + err) and step over.
    const double half = std::ldexp(bbox.extent(k), -(depth + 1));
    const double c = bbox.min[k] + (static_cast<double>(i) + 0.5) * cell;
    const double diff = x[k] - c;
    const double b = diff - x[k];
    const double err = (x[k] - (diff - b)) + (-c - b);
    if ((diff < -half || (diff == -half && err < 0)) && i > 0) {
      --i;
    } else if ((diff > half || (diff == half && err > 0)) && i < last) {
      ++i;
    }
    out[k] = i;
  }
  return {out[0], out[1], out[2]};
}

Vec3 dequantize_index(const GridIndex& index, const BoundingBox& bbox, int depth) {
  check_depth(depth);
  const double cells = std::ldexp(1.0, depth);
  const std::uint32_t idx[3] = {index.ix, index.iy, index.iz};
  Vec3 out;
  for (std::size_t k = 0; k < 3; ++k) {
    out[k] = bbox.min[k] + (static_cast<double>(idx[k]) + 0.5) * (bbox.extent(k) / cells);
  }
  return out;
}

std::uint64_t morton_encode(const GridIndex& index, int depth) {
  check_depth(depth);
  return spread_bits(index.ix) | (spread_bits(index.iy) << 1) | (spread_bits(index.iz) << 2);
}

GridIndex morton_decode(std::uint64_t code, int depth) {
  check_depth(depth);
  if (depth < kMaxRecursionDepth && code >= (1ULL << (3 * depth))) {
    fail(ErrorCode::kInvalidCode, "morton code exceeds 3*R bits");
  }
  if (depth == kMaxRecursionDepth && (code >> 63) != 0) {
    fail(ErrorCode::kInvalidCode, "morton code exceeds 63 bits");
  }
  return {compact_bits(code), compact_bits(code >> 1), compact_bits(code >> 2)};
}

}  // namespace smolgs
