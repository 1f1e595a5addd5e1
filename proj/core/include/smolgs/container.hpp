#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smolgs/bytes.hpp"
#include "smolgs/feature_codec.hpp"
#include "smolgs/neural.hpp"
#include "smolgs/octree.hpp"
#include "smolgs/types.hpp"

namespace smolgs {

// On-disk layout (all integers little-endian):
//
//   "SMGS" | version u16 | flags u16 | bbox 6 x f64 (min xyz, max xyz)
//   | R u8 | n_f u8 | splat_count u64 | chunk_size u32 | section_count u8
//   | section_count x (id u8, offset u64, length u64, crc32 u32)
//   | header crc32 u32 | sections...
//
// Sections are contiguous, in table order: OCTREE, FEATURES, SCALING,
// MODEL, META. Flag bit 0 selects the neural context; bit 1 marks the
// z<<2|y<<1|x child numbering and must be set.

inline constexpr std::uint16_t kContainerVersion = 1;
inline constexpr std::uint16_t kFlagNeuralContext = 1u << 0;
inline constexpr std::uint16_t kFlagMortonZYX = 1u << 1;

enum class ContextMode : std::uint8_t { kStatic = 0, kNeural = 1 };

enum class SectionId : std::uint8_t {
  kOctree = 1,
  kFeatures = 2,
  kScaling = 3,
  kModel = 4,
  kMeta = 5,
};

std::string section_name(SectionId id);

struct SectionEntry {
  SectionId id = SectionId::kOctree;
  std::uint64_t offset = 0;
  std::uint64_t length = 0;
  std::uint32_t crc = 0;
};

struct ContainerHeader {
  std::uint16_t version = kContainerVersion;
  std::uint16_t flags = kFlagMortonZYX;
  BoundingBox bbox;
  int depth = 16;
  int n_f = 8;
  std::uint64_t splat_count = 0;
  std::uint32_t chunk_size = 65536;
  std::vector<SectionEntry> sections;
  std::size_t header_size = 0;

  ContextMode mode() const {
    return (flags & kFlagNeuralContext) ? ContextMode::kNeural : ContextMode::kStatic;
  }
  const SectionEntry& section(SectionId id) const;
};

using MetaEntries = std::vector<std::pair<std::string, std::string>>;

struct EncodeOptions {
  CodecConfig config;
  ContextMode mode = ContextMode::kStatic;
  const NeuralModel* model = nullptr;  // required in neural mode
  unsigned threads = 1;                // 0 = hardware concurrency
  MetaEntries meta;
};

/// Everything the encoder committed to: the decoder reproduces it exactly.
struct QuantizedState {
  BoundingBox bbox;
  int depth = 16;
  std::vector<std::uint64_t> leaf_codes;
  // Leaf-centre coordinates with merged (unquantized) features/scaling.
  SplatCloud merged;
  QuantizedBlock features;
  QuantizedBlock scaling;
  // One entry (static) or one per leaf (neural).
  std::vector<QuantParams> feature_context;
  std::vector<QuantParams> scaling_context;
  OctreeStream octree;
};

/// Wall time per stored component, in seconds.
struct ComponentTimings {
  double total = 0.0;
  double x = 0.0;
  double f = 0.0;
  double s = 0.0;
  double mlps = 0.0;
};

struct EncodeResult {
  Bytes bytes;
  QuantizedState state;
  ComponentTimings timings;
  std::size_t input_splats = 0;
};

EncodeResult encode_container_detailed(const SplatCloud& cloud, const EncodeOptions& options);

Bytes encode_container(const SplatCloud& cloud, const CodecConfig& config, ContextMode mode,
                       const NeuralModel* model = nullptr);

struct DecodedContainer {
  ContainerHeader header;
  /// Leaf centres in ascending Morton order with dequantized f and s.
  SplatCloud cloud;
  QuantizedBlock features;
  QuantizedBlock scaling;
  std::vector<QuantParams> feature_context;
  std::vector<QuantParams> scaling_context;
  std::optional<StaticContext> static_context;
  std::optional<NeuralModel> model;
  OctreeStream octree;
  MetaEntries meta;
  std::uint64_t feature_coded_bytes = 0;
  std::uint64_t scaling_coded_bytes = 0;
  ComponentTimings timings;
};

/// Parses and checks the header, section bounds and every CRC.
ContainerHeader read_header(std::span<const std::uint8_t> bytes);

DecodedContainer decode_container(std::span<const std::uint8_t> bytes, unsigned threads = 1);

struct SizeBreakdown {
  std::uint64_t total = 0;
  std::uint64_t x = 0;
  std::uint64_t f = 0;
  std::uint64_t s = 0;
  std::uint64_t mlps = 0;
  std::uint64_t other = 0;  // header + META
};

SizeBreakdown size_breakdown(std::span<const std::uint8_t> bytes);

/// Raw section payloads, for archive export.
std::vector<std::pair<SectionId, std::span<const std::uint8_t>>> section_payloads(
    std::span<const std::uint8_t> bytes);

}  // namespace smolgs
