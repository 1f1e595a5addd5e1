#include "smolgs/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "smolgs/error.hpp"

namespace smolgs {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyCloud: return "EmptyCloud";
    case ErrorCode::kOutOfBounds: return "OutOfBounds";
    case ErrorCode::kInvalidCode: return "InvalidCode";
    case ErrorCode::kCorruptStream: return "CorruptStream";
    case ErrorCode::kEmptyAlphabet: return "EmptyAlphabet";
    case ErrorCode::kUnknownSymbol: return "UnknownSymbol";
    case ErrorCode::kModelMismatch: return "ModelMismatch";
    case ErrorCode::kInvalidValue: return "InvalidValue";
    case ErrorCode::kShapeError: return "ShapeError";
    case ErrorCode::kDegenerateView: return "DegenerateView";
    case ErrorCode::kNoModel: return "NoModel";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kUnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::kCrcMismatch: return "CrcMismatch";
    case ErrorCode::kLimitExceeded: return "LimitExceeded";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

namespace {

bool finite3(const Vec3& v) {
  return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

}  // namespace

bool BoundingBox::contains(const Vec3& x) const {
  for (std::size_t k = 0; k < 3; ++k) {
    if (!(x[k] >= min[k] && x[k] <= max[k])) return false;
  }
  return true;
}

bool BoundingBox::contains(const BoundingBox& other) const {
  return contains(other.min) && contains(other.max);
}

void BoundingBox::validate() const {
  if (!finite3(min) || !finite3(max)) {
    fail(ErrorCode::kInvalidValue, "bounding box has non-finite bounds");
  }
  for (std::size_t k = 0; k < 3; ++k) {
    if (!(max[k] > min[k])) {
      fail(ErrorCode::kInvalidValue,
           "bounding box axis " + std::to_string(k) + " has non-positive extent");
    }
  }
}

void CodecConfig::validate() const {
  if (recursion_depth < 1 || recursion_depth > kMaxRecursionDepth) {
    fail(ErrorCode::kInvalidConfig,
         "recursion depth must be in [1, 21], got " + std::to_string(recursion_depth));
  }
  if (n_f < 1 || n_f > 255) {
    fail(ErrorCode::kInvalidConfig, "n_f must be in [1, 255]");
  }
  if (!(sigma_floor > 0) || !(delta_floor > 0) || !(min_bin_probability > 0) ||
      !(min_bin_probability < 1)) {
    fail(ErrorCode::kInvalidConfig, "floors must be positive");
  }
  if (chunk_size == 0) fail(ErrorCode::kInvalidConfig, "chunk size must be positive");
  if (target_bins < 1) fail(ErrorCode::kInvalidConfig, "target_bins must be positive");
  if (!(sigma_span > 0)) fail(ErrorCode::kInvalidConfig, "sigma_span must be positive");
  if (max_symbol_width < 2 || max_symbol_width > 16384) {
    fail(ErrorCode::kInvalidConfig, "max_symbol_width must be in [2, 16384]");
  }
}

BoundingBox tight_bounding_box(const std::vector<Splat>& splats) {
  if (splats.empty()) fail(ErrorCode::kEmptyCloud, "cannot bound an empty cloud");
  BoundingBox box;
  box.min = splats.front().x;
  box.max = splats.front().x;
  for (const Splat& s : splats) {
    if (!finite3(s.x)) fail(ErrorCode::kInvalidValue, "non-finite coordinate");
    for (std::size_t k = 0; k < 3; ++k) {
      box.min[k] = std::min(box.min[k], s.x[k]);
      box.max[k] = std::max(box.max[k], s.x[k]);
    }
  }
  constexpr double kRelative = 1e-9;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < 3; ++k) {
    const double extent = box.max[k] - box.min[k];
    if (extent > 0) {
      const double inflated = box.max[k] + kRelative * extent;
      box.max[k] = inflated > box.max[k] ? inflated : std::nextafter(box.max[k], kInf);
    } else {
      const double half = 0.5 * kRelative * std::max(1.0, std::abs(box.min[k]));
      const double lo = box.min[k] - half;
      const double hi = box.max[k] + half;
      box.min[k] = lo < box.min[k] ? lo : std::nextafter(box.min[k], -kInf);
      box.max[k] = hi > box.max[k] ? hi : std::nextafter(box.max[k], kInf);
    }
  }
  return box;
}

BoundingBox tight_bounding_box(const SplatCloud& cloud) {
  return tight_bounding_box(cloud.splats);
}

SplatCloud make_cloud(std::vector<Splat> splats, int n_f) {
  SplatCloud cloud;
  cloud.n_f = n_f;
  cloud.bbox = tight_bounding_box(splats);
  cloud.splats = std::move(splats);
  validate_cloud(cloud);
  return cloud;
}

void validate_cloud(const SplatCloud& cloud) {
  if (cloud.n_f < 1) fail(ErrorCode::kInvalidConfig, "n_f must be positive");
  cloud.bbox.validate();
  for (std::size_t i = 0; i < cloud.splats.size(); ++i) {
    const Splat& s = cloud.splats[i];
    if (s.f.size() != static_cast<std::size_t>(cloud.n_f)) {
      fail(ErrorCode::kShapeError, "splat " + std::to_string(i) + " has " +
                                       std::to_string(s.f.size()) + " features, expected " +
                                       std::to_string(cloud.n_f));
    }
    if (!finite3(s.x) || !finite3(s.s) ||
        !std::all_of(s.f.begin(), s.f.end(), [](double v) { return std::isfinite(v); })) {
      fail(ErrorCode::kInvalidValue, "splat " + std::to_string(i) + " has non-finite values");
    }
    if (!cloud.bbox.contains(s.x)) {
      fail(ErrorCode::kOutOfBounds, "splat " + std::to_string(i) + " lies outside the bbox");
    }
  }
}

}  // namespace smolgs
