#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "smolgs/container.hpp"
#include "smolgs/feature_codec.hpp"
#include "smolgs/octree.hpp"

namespace smolgs {

struct StreamRate {
  RateReport model;             // -log2 of the coding-bin masses
  std::uint64_t actual_bits = 0;  // range-coded payload + escapes
};

struct ContainerStats {
  ContainerHeader header;
  SizeBreakdown sizes;
  std::uint64_t zip_bytes = 0;
  std::uint64_t occupancy_byte_count = 0;
  OccupancyStatistics occupancy;
  // Most frequent occupancy byte values, by count then value.
  std::vector<std::pair<std::uint8_t, std::uint64_t>> top_bytes;
  StreamRate features;
  StreamRate scaling;
  ComponentTimings decode_timings;

  double bits_per_splat(std::uint64_t bytes) const {
    return header.splat_count == 0 ? 0.0 : 8.0 * static_cast<double>(bytes) / header.splat_count;
  }
};

ContainerStats container_stats(std::span<const std::uint8_t> bytes, unsigned threads = 1,
                               std::size_t top_n = 20);

}  // namespace smolgs
