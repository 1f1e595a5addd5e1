#include "smolgs/octree.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <string>

#include "smolgs/error.hpp"

namespace smolgs {

std::vector<std::uint8_t> occupancy_from_codes(const std::vector<std::uint64_t>& sorted_codes,
                                               int depth) {
  std::vector<std::uint8_t> bytes;
  for (int level = 0; level < depth; ++level) {
    const int node_shift = 3 * (depth - level);
    const int child_shift = node_shift - 3;
    std::size_t i = 0;
    while (i < sorted_codes.size()) {
      // node_shift may reach 63 at depth 21; codes never use bit 63.
      const std::uint64_t node = sorted_codes[i] >> node_shift;
      std::uint8_t byte = 0;
      while (i < sorted_codes.size() && (sorted_codes[i] >> node_shift) == node) {
        byte |= static_cast<std::uint8_t>(1u << ((sorted_codes[i] >> child_shift) & 7u));
        ++i;
      }
      bytes.push_back(byte);
    }
  }
  return bytes;
}

OctreeBuild build_octree(const SplatCloud& cloud, int depth) {
  if (cloud.empty()) fail(ErrorCode::kEmptyCloud, "cannot build an octree of an empty cloud");
  cloud.bbox.validate();

  const std::size_t n = cloud.size();
  std::vector<std::uint64_t> codes(n);
  for (std::size_t i = 0; i < n; ++i) {
    codes[i] = morton_encode(quantize_coordinate(cloud.splats[i].x, cloud.bbox, depth), depth);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return codes[a] < codes[b]; });

  OctreeBuild out;
  for (std::size_t k = 0; k < n;) {
    const std::uint64_t code = codes[order[k]];
    std::vector<std::size_t> group;
    while (k < n && codes[order[k]] == code) group.push_back(order[k++]);
    out.canonical_order.push_back(group.front());
    out.leaf_codes.push_back(code);
    out.merge_groups.push_back(std::move(group));
  }
  out.stream.bbox = cloud.bbox;
  out.stream.depth = depth;
  out.stream.leaf_count = out.leaf_codes.size();
  out.stream.occupancy_bytes = occupancy_from_codes(out.leaf_codes, depth);
  return out;
}

std::vector<std::uint64_t> decode_octree_codes(const OctreeStream& stream) {
  if (stream.depth < 1 || stream.depth > kMaxRecursionDepth) {
    fail(ErrorCode::kCorruptStream, "octree depth out of range");
  }
  const auto& bytes = stream.occupancy_bytes;
  std::vector<std::uint64_t> nodes{0};
  std::vector<std::uint64_t> next;
  std::size_t pos = 0;
  for (int level = 0; level < stream.depth; ++level) {
    next.clear();
    for (std::uint64_t node : nodes) {
      if (pos >= bytes.size()) {
        fail(ErrorCode::kCorruptStream,
             "occupancy stream truncated at level " + std::to_string(level));
      }
      const std::uint8_t byte = bytes[pos++];
      if (byte == 0) {
        fail(ErrorCode::kCorruptStream,
             "zero occupancy byte at offset " + std::to_string(pos - 1));
      }
      for (unsigned child = 0; child < 8; ++child) {
        if (byte & (1u << child)) next.push_back((node << 3) | child);
      }
    }
    nodes.swap(next);
  }
  if (pos != bytes.size()) {
    fail(ErrorCode::kCorruptStream,
         std::to_string(bytes.size() - pos) + " trailing occupancy bytes");
  }
  if (nodes.size() != stream.leaf_count) {
    fail(ErrorCode::kCorruptStream, "leaf count mismatch: stream declares " +
                                        std::to_string(stream.leaf_count) + ", decoded " +
                                        std::to_string(nodes.size()));
  }
  return nodes;
}

std::vector<GridIndex> decode_octree(const OctreeStream& stream) {
  const auto codes = decode_octree_codes(stream);
  std::vector<GridIndex> out;
  out.reserve(codes.size());
  for (std::uint64_t c : codes) out.push_back(morton_decode(c, stream.depth));
  return out;
}

SplatCloud merge_leaf_groups(const SplatCloud& cloud, const OctreeBuild& build) {
  SplatCloud out;
  out.bbox = cloud.bbox;
  out.n_f = cloud.n_f;
  out.splats.reserve(build.merge_groups.size());
  const auto nf = static_cast<std::size_t>(cloud.n_f);
  for (std::size_t leaf = 0; leaf < build.merge_groups.size(); ++leaf) {
    const auto& group = build.merge_groups[leaf];
    Splat merged;
    merged.x = dequantize_index(morton_decode(build.leaf_codes[leaf], build.stream.depth),
                                cloud.bbox, build.stream.depth);
    merged.f.assign(nf, 0.0);
    if (group.size() == 1) {
      merged.f = cloud.splats[group.front()].f;
      merged.s = cloud.splats[group.front()].s;
    } else {
      // Group indices are ascending, so the summation order is fixed.
      for (std::size_t idx : group) {
        const Splat& s = cloud.splats[idx];
        for (std::size_t c = 0; c < nf; ++c) merged.f[c] += s.f[c];
        for (std::size_t k = 0; k < 3; ++k) merged.s[k] += s.s[k];
      }
      const double inv = static_cast<double>(group.size());
      for (double& v : merged.f) v /= inv;
      for (double& v : merged.s) v /= inv;
    }
    out.splats.push_back(std::move(merged));
  }
  return out;
}

double OccupancyStatistics::mean_popcount(std::size_t level) const {
  const auto& h = popcount_per_level.at(level);
  std::uint64_t count = 0;
  std::uint64_t weighted = 0;
  for (std::size_t k = 1; k <= 8; ++k) {
    count += h[k];
    weighted += h[k] * k;
  }
  return count == 0 ? 0.0 : static_cast<double>(weighted) / static_cast<double>(count);
}

OccupancyStatistics occupancy_statistics(const OctreeStream& stream) {
  OccupancyStatistics stats;
  stats.popcount_per_level.assign(static_cast<std::size_t>(stream.depth), {});
  const auto& bytes = stream.occupancy_bytes;
  std::size_t pos = 0;
  std::uint64_t nodes = 1;
  for (int level = 0; level < stream.depth; ++level) {
    std::uint64_t children = 0;
    for (std::uint64_t i = 0; i < nodes; ++i) {
      if (pos >= bytes.size()) fail(ErrorCode::kCorruptStream, "occupancy stream truncated");
      const std::uint8_t b = bytes[pos++];
      const int pc = std::popcount(static_cast<unsigned>(b));
      stats.popcount_per_level[static_cast<std::size_t>(level)][static_cast<std::size_t>(pc)]++;
      stats.byte_frequency[b]++;
      children += static_cast<std::uint64_t>(pc);
    }
    nodes = children;
  }
  return stats;
}

}  // namespace smolgs
