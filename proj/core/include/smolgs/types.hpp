#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace smolgs {

using Vec3 = std::array<double, 3>;

/// Axis-aligned scene box; every axis has strictly positive extent.
struct BoundingBox {
  Vec3 min{};
  Vec3 max{};

  double extent(std::size_t axis) const { return max[axis] - min[axis]; }
  bool contains(const Vec3& x) const;
  bool contains(const BoundingBox& other) const;
  /// Throws kInvalidValue when an axis is non-finite or has extent <= 0.
  void validate() const;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct Splat {
  Vec3 x{};
  std::vector<double> f;  // abstract feature, n_f components
  Vec3 s{};               // scaling controller

  friend bool operator==(const Splat&, const Splat&) = default;
};

struct SplatCloud {
  std::vector<Splat> splats;
  BoundingBox bbox;
  int n_f = 8;

  std::size_t size() const { return splats.size(); }
  bool empty() const { return splats.empty(); }
};

struct CodecConfig {
  int recursion_depth = 16;
  int n_f = 8;
  double sigma_floor = 1e-6;
  double delta_floor = 1e-6;
  double min_bin_probability = 1.0 / 65536.0;
  std::uint32_t chunk_size = 65536;
  // Static-context bin count per channel (range / target_bins).
  int target_bins = 256;
  // Symbol alphabets cover mu/delta +- sigma_span * sigma/delta, at most
  // max_symbol_width entries wide.
  double sigma_span = 12.0;
  int max_symbol_width = 4096;

  void validate() const;
};

inline constexpr int kMaxRecursionDepth = 21;

/// Componentwise min/max of the coordinates, inflated so that points on the
/// upper face still quantize inside the grid.
BoundingBox tight_bounding_box(const std::vector<Splat>& splats);
BoundingBox tight_bounding_box(const SplatCloud& cloud);

/// Builds a cloud with a tight bounding box; checks feature widths and
/// finiteness.
SplatCloud make_cloud(std::vector<Splat> splats, int n_f);

/// Checks every SplatCloud invariant (feature width, finiteness, bbox
/// containment). Throws CodecError on the first violation.
void validate_cloud(const SplatCloud& cloud);

}  // namespace smolgs
