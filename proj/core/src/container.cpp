#include "smolgs/container.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <memory>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "smolgs/error.hpp"
#include "smolgs/huffman.hpp"

namespace smolgs {

namespace {

constexpr char kMagic[4] = {'S', 'M', 'G', 'S'};
constexpr std::size_t kFixedHeaderSize = 71;
constexpr std::size_t kSectionEntrySize = 21;
constexpr SectionId kSectionOrder[] = {SectionId::kOctree, SectionId::kFeatures,
                                       SectionId::kScaling, SectionId::kModel, SectionId::kMeta};
constexpr std::uint8_t kModelStatic = 0;
constexpr std::uint8_t kModelNeural = 1;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

unsigned resolve_threads(unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  return threads;
}

// Runs fn(i) for i in [0, n) on up to `threads` workers; rethrows the first
// failure.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  threads = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (error) std::rethrow_exception(error);
}

// Re-raises a section-level failure with the section named.
template <typename Fn>
auto in_section(SectionId id, Fn&& fn) {
  try {
    return fn();
  } catch (const CodecError& e) {
    const ErrorCode code =
        e.code() == ErrorCode::kNoModel ? ErrorCode::kNoModel : ErrorCode::kCorruptStream;
    fail(code, "section " + section_name(id) + ": " + e.what());
  }
}

std::size_t chunk_count(std::size_t n, std::uint32_t chunk_size) {
  return (n + chunk_size - 1) / chunk_size;
}

// Per-(splat, channel) coding models. Static contexts share one model per
// channel; neural contexts build each model on demand, a window of splats at
// a time across `helpers` threads.
class ModelSource {
 public:
  ModelSource(const std::vector<QuantParams>& context, const CodecConfig& config, unsigned helpers = 1)
      : context_(context), config_(config), helpers_(helpers) {
    if (context_.size() == 1) {
      for (const ChannelParams& p : context_[0].channels) {
        shared_.push_back(make_channel_model(p, config_));
      }
    }
  }

  // One provider per worker: the returned reference is valid until the
  // provider next moves past its window.
  ChannelModelProvider provider() const {
    if (!shared_.empty()) {
      return [this](std::size_t, std::size_t c) -> const ChannelModel& { return shared_[c]; };
    }
    struct Window {
      std::size_t begin = 0;
      std::size_t rows = 0;
      std::size_t channels = 0;
      std::vector<ChannelModel> models;
    };
    auto w = std::make_shared<Window>();
    return [this, w](std::size_t i, std::size_t c) -> const ChannelModel& {
      if (i < w->begin || i >= w->begin + w->rows) {
        constexpr std::size_t kWindow = 64;
        w->begin = i;
        w->rows = std::min(kWindow, context_.size() - i);
        w->channels = context_[i].channels.size();
        w->models.resize(w->rows * w->channels);
        parallel_for(w->models.size(), helpers_, [&](std::size_t k) {
          w->models[k] = make_channel_model(context_[i + k / w->channels].channels[k % w->channels], config_);
        });
      }
      return w->models[(i - w->begin) * w->channels + c];
    };
  }

 private:
  const std::vector<QuantParams>& context_;
  const CodecConfig& config_;
  unsigned helpers_;
  std::vector<ChannelModel> shared_;
};

// Workers left over per chunk once every chunk has one.
unsigned helpers_per_chunk(unsigned threads, std::size_t chunks) {
  const std::size_t t = resolve_threads(threads);
  return chunks == 0 ? 1u : static_cast<unsigned>(std::max<std::size_t>(1, t / chunks));
}

QuantizedBlock quantize_block(ChannelRole role, const SplatCloud& merged,
                              const std::vector<QuantParams>& context) {
  QuantizedBlock block;
  block.role = role;
  block.n_splats = merged.size();
  block.n_channels = role == ChannelRole::kFeature ? static_cast<std::size_t>(merged.n_f) : 3;
  block.symbols.resize(block.n_splats * block.n_channels);
  block.deltas.resize(block.n_splats * block.n_channels);
  for (std::size_t i = 0; i < block.n_splats; ++i) {
    const QuantParams& params = context.size() == 1 ? context[0] : context[i];
    for (std::size_t c = 0; c < block.n_channels; ++c) {
      const double v = role == ChannelRole::kFeature ? merged.splats[i].f[c] : merged.splats[i].s[c];
      const double delta = params.channels[c].delta;
      const auto q = quantize_value(v, delta);
      block.symbols[i * block.n_channels + c] = q.symbol;
      block.deltas[i * block.n_channels + c] = delta;
    }
  }
  return block;
}

Bytes encode_value_section(const QuantizedBlock& block, const std::vector<QuantParams>& context,
                           const CodecConfig& config, unsigned threads) {
  const std::size_t chunks = chunk_count(block.n_splats, config.chunk_size);
  if (chunks > std::numeric_limits<std::uint32_t>::max()) {
    fail(ErrorCode::kLimitExceeded, "too many chunks");
  }
  ModelSource source(context, config, helpers_per_chunk(threads, chunks));
  std::vector<CodedChunk> coded(chunks);
  parallel_for(chunks, threads, [&](std::size_t k) {
    const std::size_t begin = k * config.chunk_size;
    const std::size_t end = std::min(block.n_splats, begin + config.chunk_size);
    coded[k] = encode_chunk(block, begin, end, source.provider());
  });
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(block.role));
  w.u8(static_cast<std::uint8_t>(block.n_channels));
  w.u32(static_cast<std::uint32_t>(chunks));
  for (std::size_t k = 0; k < chunks; ++k) {
    const CodedChunk& c = coded[k];
    const std::size_t begin = k * config.chunk_size;
    const std::size_t end = std::min(block.n_splats, begin + config.chunk_size);
    if (c.payload.size() > std::numeric_limits<std::uint32_t>::max() ||
        c.escapes.size() > std::numeric_limits<std::uint32_t>::max()) {
      fail(ErrorCode::kLimitExceeded, "chunk payload exceeds 4 GiB");
    }
    w.u32(static_cast<std::uint32_t>(end - begin));
    w.u32(c.symbol_count);
    w.u32(static_cast<std::uint32_t>(c.payload.size()));
    w.u32(static_cast<std::uint32_t>(c.escapes.size()));
    w.bytes(c.payload);
    for (std::int32_t e : c.escapes) w.i32(e);
  }
  return w.take();
}

// Returns the number of range-coded plus escape bytes.
std::uint64_t decode_value_section(std::span<const std::uint8_t> data, QuantizedBlock& block,
                                   const std::vector<QuantParams>& context,
                                   const CodecConfig& config, unsigned threads) {
  ByteReader r(data, "value section");
  const std::uint8_t role = r.u8();
  if (role != static_cast<std::uint8_t>(block.role)) {
    fail(ErrorCode::kCorruptStream, "channel role mismatch");
  }
  if (r.u8() != block.n_channels) fail(ErrorCode::kCorruptStream, "channel count mismatch");
  const std::uint32_t chunks = r.u32();
  if (chunks != chunk_count(block.n_splats, config.chunk_size)) {
    fail(ErrorCode::kCorruptStream, "chunk count does not match splat_count/chunk_size");
  }
  std::vector<CodedChunk> coded(chunks);
  std::uint64_t coded_bytes = 0;
  for (std::uint32_t k = 0; k < chunks; ++k) {
    const std::size_t begin = static_cast<std::size_t>(k) * config.chunk_size;
    const std::size_t end = std::min(block.n_splats, begin + config.chunk_size);
    if (r.u32() != end - begin) fail(ErrorCode::kCorruptStream, "chunk boundary mismatch");
    CodedChunk& c = coded[k];
    c.symbol_count = r.u32();
    const std::uint32_t payload_len = r.u32();
    const std::uint32_t escape_count = r.u32();
    auto payload = r.bytes(payload_len);
    c.payload.assign(payload.begin(), payload.end());
    if (static_cast<std::uint64_t>(escape_count) * 4 > r.remaining()) {
      fail(ErrorCode::kCorruptStream, "escape payloads truncated");
    }
    c.escapes.resize(escape_count);
    for (auto& e : c.escapes) e = r.i32();
    coded_bytes += c.coded_bytes();
  }
  r.expect_end();
  ModelSource source(context, config, helpers_per_chunk(threads, chunks));
  parallel_for(chunks, threads, [&](std::size_t k) {
    const std::size_t begin = k * config.chunk_size;
    const std::size_t end = std::min(block.n_splats, begin + config.chunk_size);
    decode_chunk(coded[k], block, begin, end, source.provider());
  });
  return coded_bytes;
}

void write_triples(ByteWriter& w, const QuantParams& params) {
  w.u8(static_cast<std::uint8_t>(params.channels.size()));
  for (const ChannelParams& p : params.channels) {
    w.f64(p.mu);
    w.f64(p.sigma);
    w.f64(p.delta);
  }
}

QuantParams read_triples(ByteReader& r, std::size_t expected) {
  QuantParams params;
  if (r.u8() != expected) fail(ErrorCode::kCorruptStream, "static context channel count");
  for (std::size_t c = 0; c < expected; ++c) {
    ChannelParams p;
    p.mu = r.f64();
    p.sigma = r.f64();
    p.delta = r.f64();
    params.channels.push_back(p);
  }
  return params;
}

Bytes encode_octree_section(const OctreeStream& stream) {
  const auto freq = byte_histogram(stream.occupancy_bytes);
  const HuffmanTable table = huffman_build(freq);
  const HuffmanBits bits = huffman_encode(stream.occupancy_bytes, table);
  ByteWriter w;
  for (std::uint8_t len : table.code_lengths()) w.u8(len);
  w.u64(stream.occupancy_bytes.size());
  w.u64(bits.bit_count);
  w.bytes(bits.bytes);
  return w.take();
}

OctreeStream decode_octree_section(std::span<const std::uint8_t> data,
                                   const ContainerHeader& header) {
  ByteReader r(data, "octree section");
  std::array<std::uint8_t, 256> lengths;
  for (auto& len : lengths) len = r.u8();
  const HuffmanTable table = HuffmanTable::from_lengths(lengths);
  const std::uint64_t raw_count = r.u64();
  const std::uint64_t bit_count = r.u64();
  if (bit_count > static_cast<std::uint64_t>(r.remaining()) * 8 ||
      (bit_count + 7) / 8 != r.remaining()) {
    fail(ErrorCode::kCorruptStream, "huffman bit count does not match the payload");
  }
  // Every occupancy byte costs at least one bit.
  if (raw_count > bit_count) fail(ErrorCode::kCorruptStream, "occupancy byte count too large");
  auto payload = r.bytes(r.remaining());
  OctreeStream stream;
  stream.bbox = header.bbox;
  stream.depth = header.depth;
  stream.leaf_count = header.splat_count;
  stream.occupancy_bytes =
      huffman_decode(payload, bit_count, table, static_cast<std::size_t>(raw_count));
  return stream;
}

Bytes encode_meta(const MetaEntries& meta) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(meta.size()));
  for (const auto& [k, v] : meta) {
    w.u32(static_cast<std::uint32_t>(k.size()));
    w.str(k);
    w.u32(static_cast<std::uint32_t>(v.size()));
    w.str(v);
  }
  return w.take();
}

MetaEntries decode_meta(std::span<const std::uint8_t> data) {
  ByteReader r(data, "meta section");
  MetaEntries meta;
  const std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    std::string k = r.str(r.u32());
    std::string v = r.str(r.u32());
    meta.emplace_back(std::move(k), std::move(v));
  }
  r.expect_end();
  return meta;
}

Bytes assemble(const ContainerHeader& header_in, const std::vector<Bytes>& sections) {
  ContainerHeader header = header_in;
  const std::size_t header_size = kFixedHeaderSize + kSectionEntrySize * sections.size() + 4;
  std::uint64_t offset = header_size;
  header.sections.clear();
  for (std::size_t i = 0; i < sections.size(); ++i) {
    header.sections.push_back(
        {kSectionOrder[i], offset, sections[i].size(), crc32(sections[i])});
    offset += sections[i].size();
  }
  ByteWriter w;
  w.bytes(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(kMagic), 4));
  w.u16(header.version);
  w.u16(header.flags);
  for (double v : header.bbox.min) w.f64(v);
  for (double v : header.bbox.max) w.f64(v);
  w.u8(static_cast<std::uint8_t>(header.depth));
  w.u8(static_cast<std::uint8_t>(header.n_f));
  w.u64(header.splat_count);
  w.u32(header.chunk_size);
  w.u8(static_cast<std::uint8_t>(header.sections.size()));
  for (const SectionEntry& e : header.sections) {
    w.u8(static_cast<std::uint8_t>(e.id));
    w.u64(e.offset);
    w.u64(e.length);
    w.u32(e.crc);
  }
  w.u32(crc32(w.buffer()));
  for (const Bytes& s : sections) w.bytes(s);
  return w.take();
}

std::span<const std::uint8_t> section_span(std::span<const std::uint8_t> bytes,
                                           const SectionEntry& e) {
  return bytes.subspan(static_cast<std::size_t>(e.offset), static_cast<std::size_t>(e.length));
}

// Parameters both sides need to rebuild identical symbol models.
void write_coding_params(ByteWriter& w, const CodecConfig& config) {
  w.f64(config.sigma_floor);
  w.f64(config.delta_floor);
  w.f64(config.min_bin_probability);
  w.f64(config.sigma_span);
  w.u32(static_cast<std::uint32_t>(config.max_symbol_width));
}

CodecConfig read_coding_params(ByteReader& r, const ContainerHeader& header) {
  CodecConfig config;
  config.recursion_depth = header.depth;
  config.n_f = header.n_f;
  config.chunk_size = header.chunk_size;
  config.sigma_floor = r.f64();
  config.delta_floor = r.f64();
  config.min_bin_probability = r.f64();
  config.sigma_span = r.f64();
  const std::uint32_t width = r.u32();
  if (width > static_cast<std::uint32_t>(std::numeric_limits<int>::max())) {
    fail(ErrorCode::kCorruptStream, "symbol width out of range");
  }
  config.max_symbol_width = static_cast<int>(width);
  try {
    config.validate();
  } catch (const CodecError& e) {
    fail(ErrorCode::kCorruptStream, std::string("coding parameters: ") + e.what());
  }
  return config;
}

}  // namespace

std::string section_name(SectionId id) {
  switch (id) {
    case SectionId::kOctree: return "OCTREE";
    case SectionId::kFeatures: return "FEATURES";
    case SectionId::kScaling: return "SCALING";
    case SectionId::kModel: return "MODEL";
    case SectionId::kMeta: return "META";
  }
  return "UNKNOWN(" + std::to_string(static_cast<int>(id)) + ")";
}

const SectionEntry& ContainerHeader::section(SectionId id) const {
  for (const SectionEntry& e : sections) {
    if (e.id == id) return e;
  }
  fail(ErrorCode::kCorruptStream, "missing section " + section_name(id));
}

EncodeResult encode_container_detailed(const SplatCloud& cloud, const EncodeOptions& options) {
  const CodecConfig& config = options.config;
  config.validate();
  if (cloud.empty()) fail(ErrorCode::kEmptyCloud, "cannot encode an empty cloud");
  if (cloud.n_f != config.n_f) {
    fail(ErrorCode::kInvalidConfig, "cloud n_f " + std::to_string(cloud.n_f) +
                                        " does not match configured n_f " +
                                        std::to_string(config.n_f));
  }
  if (options.mode == ContextMode::kNeural) {
    if (options.model == nullptr) fail(ErrorCode::kNoModel, "neural context needs weights");
    options.model->validate();
    if (options.model->n_f != config.n_f) {
      fail(ErrorCode::kInvalidConfig, "model n_f does not match the configuration");
    }
  }
  const auto start = Clock::now();
  EncodeResult result;
  result.input_splats = cloud.size();
  QuantizedState& st = result.state;

  // Coordinates.
  auto t0 = Clock::now();
  SplatCloud bounded;
  bounded.n_f = cloud.n_f;
  bounded.bbox = grid_bounding_box(tight_bounding_box(cloud.splats), config.recursion_depth);
  bounded.splats = cloud.splats;
  validate_cloud(bounded);
  const OctreeBuild build = build_octree(bounded, config.recursion_depth);
  st.bbox = bounded.bbox;
  st.depth = config.recursion_depth;
  st.leaf_codes = build.leaf_codes;
  st.octree = build.stream;
  st.merged = merge_leaf_groups(bounded, build);
  Bytes octree_section = encode_octree_section(build.stream);
  result.timings.x = seconds_since(t0);

  // Context parameters.
  t0 = Clock::now();
  Bytes model_section;
  {
    ByteWriter w;
    w.u8(options.mode == ContextMode::kStatic ? kModelStatic : kModelNeural);
    write_coding_params(w, config);
    if (options.mode == ContextMode::kStatic) {
      const StaticContext ctx = fit_static_context(st.merged, config);
      st.feature_context = {ctx.features};
      st.scaling_context = {ctx.scaling};
      write_triples(w, ctx.features);
      write_triples(w, ctx.scaling);
    } else {
      const std::size_t n = st.merged.size();
      st.feature_context.resize(n);
      st.scaling_context.resize(n);
      parallel_for(n, options.threads, [&](std::size_t i) {
        auto ctx = predict_context(normalize_to_unit(st.merged.splats[i].x, st.bbox),
                                   *options.model, config.sigma_floor, config.delta_floor);
        st.feature_context[i] = std::move(ctx.features);
        st.scaling_context[i] = std::move(ctx.scaling);
      });
      w.bytes(serialize_model(*options.model));
    }
    model_section = w.take();
  }
  result.timings.mlps = seconds_since(t0);

  t0 = Clock::now();
  st.features = quantize_block(ChannelRole::kFeature, st.merged, st.feature_context);
  Bytes feature_section =
      encode_value_section(st.features, st.feature_context, config, options.threads);
  result.timings.f = seconds_since(t0);

  t0 = Clock::now();
  st.scaling = quantize_block(ChannelRole::kScaling, st.merged, st.scaling_context);
  Bytes scaling_section =
      encode_value_section(st.scaling, st.scaling_context, config, options.threads);
  result.timings.s = seconds_since(t0);

  MetaEntries meta = {{"encoder", "smolgs 1.0"},
                      {"input_splats", std::to_string(cloud.size())}};
  meta.insert(meta.end(), options.meta.begin(), options.meta.end());

  ContainerHeader header;
  header.flags = kFlagMortonZYX;
  if (options.mode == ContextMode::kNeural) header.flags |= kFlagNeuralContext;
  header.bbox = st.bbox;
  header.depth = config.recursion_depth;
  header.n_f = config.n_f;
  header.splat_count = st.leaf_codes.size();
  header.chunk_size = config.chunk_size;
  result.bytes = assemble(header, {octree_section, feature_section, scaling_section,
                                   model_section, encode_meta(meta)});
  result.timings.total = seconds_since(start);
  return result;
}

Bytes encode_container(const SplatCloud& cloud, const CodecConfig& config, ContextMode mode,
                       const NeuralModel* model) {
  EncodeOptions options;
  options.config = config;
  options.mode = mode;
  options.model = model;
  return encode_container_detailed(cloud, options).bytes;
}

ContainerHeader read_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || !std::equal(bytes.begin(), bytes.begin() + 4, kMagic)) {
    fail(ErrorCode::kBadMagic, "not a container (missing SMGS magic)");
  }
  ByteReader r(bytes, "header");
  r.bytes(4);
  ContainerHeader h;
  h.version = r.u16();
  if (h.version != kContainerVersion) {
    fail(ErrorCode::kUnsupportedVersion, "container version " + std::to_string(h.version));
  }
  h.flags = r.u16();
  for (double& v : h.bbox.min) v = r.f64();
  for (double& v : h.bbox.max) v = r.f64();
  h.depth = r.u8();
  h.n_f = r.u8();
  h.splat_count = r.u64();
  h.chunk_size = r.u32();
  const std::uint8_t count = r.u8();
  for (std::uint8_t i = 0; i < count; ++i) {
    SectionEntry e;
    e.id = static_cast<SectionId>(r.u8());
    e.offset = r.u64();
    e.length = r.u64();
    e.crc = r.u32();
    h.sections.push_back(e);
  }
  const std::size_t crc_offset = r.position();
  const std::uint32_t header_crc = r.u32();
  h.header_size = r.position();
  if (crc32(bytes.first(crc_offset)) != header_crc) {
    fail(ErrorCode::kCrcMismatch, "header CRC does not match");
  }
  if ((h.flags & kFlagMortonZYX) == 0 || (h.flags & ~(kFlagMortonZYX | kFlagNeuralContext))) {
    fail(ErrorCode::kUnsupportedVersion, "unsupported container flags");
  }
  if (h.depth < 1 || h.depth > kMaxRecursionDepth || h.n_f < 1 || h.chunk_size == 0 ||
      h.splat_count == 0) {
    fail(ErrorCode::kCorruptStream, "header fields out of range");
  }
  try {
    h.bbox.validate();
  } catch (const CodecError& e) {
    fail(ErrorCode::kCorruptStream, std::string("header: ") + e.what());
  }
  if (h.sections.size() != std::size(kSectionOrder)) {
    fail(ErrorCode::kCorruptStream, "expected 5 sections, found " + std::to_string(count));
  }
  std::uint64_t expected_offset = h.header_size;
  for (std::size_t i = 0; i < h.sections.size(); ++i) {
    const SectionEntry& e = h.sections[i];
    if (e.id != kSectionOrder[i]) {
      fail(ErrorCode::kCorruptStream, "section table out of order at entry " + std::to_string(i));
    }
    if (e.offset != expected_offset) {
      fail(ErrorCode::kCorruptStream, "section " + section_name(e.id) + " is not contiguous");
    }
    if (e.offset > bytes.size() || e.length > bytes.size() - e.offset) {
      fail(ErrorCode::kCorruptStream, "section " + section_name(e.id) + " extends past the end of the file");
    }
    expected_offset += e.length;
  }
  if (expected_offset != bytes.size()) {
    fail(ErrorCode::kCorruptStream,
         std::to_string(bytes.size() - expected_offset) + " trailing bytes after the last section");
  }
  for (const SectionEntry& e : h.sections) {
    if (crc32(section_span(bytes, e)) != e.crc) {
      fail(ErrorCode::kCrcMismatch, "section " + section_name(e.id) + " CRC does not match");
    }
  }
  return h;
}

DecodedContainer decode_container(std::span<const std::uint8_t> bytes, unsigned threads) {
  const auto start = Clock::now();
  DecodedContainer out;
  out.header = read_header(bytes);
  const ContainerHeader& h = out.header;
  CodecConfig config;

  auto t0 = Clock::now();
  out.octree = in_section(SectionId::kOctree, [&] {
    return decode_octree_section(section_span(bytes, h.section(SectionId::kOctree)), h);
  });
  const std::vector<std::uint64_t> codes =
      in_section(SectionId::kOctree, [&] { return decode_octree_codes(out.octree); });
  out.cloud.bbox = h.bbox;
  out.cloud.n_f = h.n_f;
  out.cloud.splats.resize(codes.size());
  for (std::size_t i = 0; i < codes.size(); ++i) {
    out.cloud.splats[i].x = dequantize_index(morton_decode(codes[i], h.depth), h.bbox, h.depth);
  }
  out.timings.x = seconds_since(t0);

  t0 = Clock::now();
  in_section(SectionId::kModel, [&] {
    ByteReader r(section_span(bytes, h.section(SectionId::kModel)), "model section");
    const std::uint8_t kind = r.u8();
    const bool neural = h.mode() == ContextMode::kNeural;
    if (kind != (neural ? kModelNeural : kModelStatic)) {
      fail(ErrorCode::kCorruptStream, "model kind disagrees with the header flags");
    }
    config = read_coding_params(r, h);
    if (!neural) {
      StaticContext ctx;
      ctx.features = read_triples(r, static_cast<std::size_t>(h.n_f));
      ctx.scaling = read_triples(r, 3);
      r.expect_end();
      ctx.features.validate(config.sigma_floor, config.delta_floor);
      ctx.scaling.validate(config.sigma_floor, config.delta_floor);
      out.feature_context = {ctx.features};
      out.scaling_context = {ctx.scaling};
      out.static_context = std::move(ctx);
    } else {
      out.model = deserialize_model(r.bytes(r.remaining()));
      if (out.model->n_f != h.n_f) fail(ErrorCode::kCorruptStream, "model n_f mismatch");
      const std::size_t n = out.cloud.size();
      out.feature_context.resize(n);
      out.scaling_context.resize(n);
      parallel_for(n, threads, [&](std::size_t i) {
        auto ctx = predict_context(normalize_to_unit(out.cloud.splats[i].x, h.bbox), *out.model,
                                   config.sigma_floor, config.delta_floor);
        out.feature_context[i] = std::move(ctx.features);
        out.scaling_context[i] = std::move(ctx.scaling);
      });
    }
    return 0;
  });
  out.timings.mlps = seconds_since(t0);

  auto decode_values = [&](SectionId id, ChannelRole role, QuantizedBlock& block,
                           const std::vector<QuantParams>& context) {
    block.role = role;
    block.n_splats = out.cloud.size();
    block.n_channels = role == ChannelRole::kFeature ? static_cast<std::size_t>(h.n_f) : 3;
    block.symbols.assign(block.n_splats * block.n_channels, 0);
    block.deltas.resize(block.n_splats * block.n_channels);
    for (std::size_t i = 0; i < block.n_splats; ++i) {
      const QuantParams& p = context.size() == 1 ? context[0] : context[i];
      for (std::size_t c = 0; c < block.n_channels; ++c) {
        block.deltas[i * block.n_channels + c] = p.channels[c].delta;
      }
    }
    return in_section(id, [&] {
      return decode_value_section(section_span(bytes, h.section(id)), block, context, config,
                                  threads);
    });
  };

  t0 = Clock::now();
  out.feature_coded_bytes =
      decode_values(SectionId::kFeatures, ChannelRole::kFeature, out.features, out.feature_context);
  out.timings.f = seconds_since(t0);
  t0 = Clock::now();
  out.scaling_coded_bytes =
      decode_values(SectionId::kScaling, ChannelRole::kScaling, out.scaling, out.scaling_context);
  out.timings.s = seconds_since(t0);

  const auto nf = static_cast<std::size_t>(h.n_f);
  for (std::size_t i = 0; i < out.cloud.size(); ++i) {
    Splat& s = out.cloud.splats[i];
    s.f.resize(nf);
    for (std::size_t c = 0; c < nf; ++c) s.f[c] = out.features.dequantized(i, c);
    for (std::size_t c = 0; c < 3; ++c) s.s[c] = out.scaling.dequantized(i, c);
  }
  out.meta = in_section(SectionId::kMeta, [&] {
    return decode_meta(section_span(bytes, h.section(SectionId::kMeta)));
  });
  out.timings.total = seconds_since(start);
  return out;
}

SizeBreakdown size_breakdown(std::span<const std::uint8_t> bytes) {
  const ContainerHeader h = read_header(bytes);
  SizeBreakdown b;
  b.total = bytes.size();
  b.x = h.section(SectionId::kOctree).length;
  b.f = h.section(SectionId::kFeatures).length;
  b.s = h.section(SectionId::kScaling).length;
  b.mlps = h.section(SectionId::kModel).length;
  b.other = h.header_size + h.section(SectionId::kMeta).length;
  return b;
}

std::vector<std::pair<SectionId, std::span<const std::uint8_t>>> section_payloads(
    std::span<const std::uint8_t> bytes) {
  const ContainerHeader h = read_header(bytes);
  std::vector<std::pair<SectionId, std::span<const std::uint8_t>>> out;
  for (const SectionEntry& e : h.sections) out.emplace_back(e.id, section_span(bytes, e));
  return out;
}

}  // namespace smolgs
