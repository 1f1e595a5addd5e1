#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smolgs/bytes.hpp"

namespace smolgs {

struct ZipEntry {
  std::string name;
  std::span<const std::uint8_t> data;
};

/// A deterministic .zip (fixed 1980-01-01 timestamps). Each entry is deflated
/// at level 9, or stored when deflate does not shrink it.
Bytes write_zip(const std::vector<ZipEntry>& entries);

/// One entry per container section (octree.bin, features.bin, ...) plus the
/// header as header.bin.
Bytes container_zip(std::span<const std::uint8_t> container);

}  // namespace smolgs
