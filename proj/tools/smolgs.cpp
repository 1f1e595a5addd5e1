// smolgs: encode, decode and inspect compressed Gaussian-splat containers.
//
// Exit codes: 0 ok, 1 malformed input or container, 2 I/O failure,
// 3 bad configuration (flags, missing model, limits).

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "smolgs/container.hpp"
#include "smolgs/error.hpp"
#include "smolgs/fixtures.hpp"
#include "smolgs/neural.hpp"
#include "smolgs/splat_io.hpp"
#include "smolgs/stats.hpp"
#include "smolgs/zip_export.hpp"

namespace {

using namespace smolgs;
using nlohmann::ordered_json;

constexpr int kExitParse = 1;
constexpr int kExitIo = 2;
constexpr int kExitConfig = 3;
constexpr int kStatsSchemaVersion = 1;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIoError: return kExitIo;
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kNoModel:
    case ErrorCode::kLimitExceeded: return kExitConfig;
    default: return kExitParse;
  }
}

unsigned env_threads() {
  const char* v = std::getenv("SMOLGS_THREADS");
  if (v == nullptr || *v == '\0') return 1;
  char* end = nullptr;
  const unsigned long n = std::strtoul(v, &end, 10);
  if (*end != '\0' || n > 1024) fail(ErrorCode::kInvalidConfig, "SMOLGS_THREADS must be 0..1024");
  return static_cast<unsigned>(n);  // 0 = hardware concurrency
}

struct EncodeArgs {
  std::string input, output, context = "static", weights;
  int recursion = 16;
  int nf = 8;
  std::uint32_t chunk = 65536;
  bool zip = false;
};

int run_encode(const EncodeArgs& a, bool nf_given) {
  const Bytes raw = read_file(a.input);
  SplatCloud cloud = read_splats(raw, a.nf);
  if (detect_format(raw) == SplatFormat::kNative && nf_given && cloud.n_f != a.nf) {
    fail(ErrorCode::kInvalidConfig, "--nf " + std::to_string(a.nf) + " but the input has n_f " +
                                        std::to_string(cloud.n_f));
  }
  EncodeOptions opt;
  opt.config.recursion_depth = a.recursion;
  opt.config.n_f = cloud.n_f;
  opt.config.chunk_size = a.chunk;
  opt.threads = env_threads();
  std::optional<NeuralModel> model;
  if (a.context == "neural") {
    if (a.weights.empty()) fail(ErrorCode::kNoModel, "--context neural requires --weights");
    model = deserialize_model(read_file(a.weights));
    opt.mode = ContextMode::kNeural;
    opt.model = &*model;
  } else if (!a.weights.empty()) {
    fail(ErrorCode::kInvalidConfig, "--weights is only used with --context neural");
  }
  const EncodeResult r = encode_container_detailed(cloud, opt);
  write_file(a.output, r.bytes);
  std::uint64_t zip_bytes = 0;
  if (a.zip) {
    const Bytes z = container_zip(r.bytes);
    write_file(a.output + ".zip", z);
    zip_bytes = z.size();
  }
  const SizeBreakdown b = size_breakdown(r.bytes);
  const double leaves = static_cast<double>(r.state.leaf_codes.size());
  std::printf(
      "splats %zu leaves %zu bytes %llu bits/splat %.4f (x %.4f f %.4f s %.4f)%s | "
      "time Total %.4fs x %.4fs f %.4fs s %.4fs MLPs %.4fs\n",
      r.input_splats, r.state.leaf_codes.size(), static_cast<unsigned long long>(b.total),
      8.0 * b.total / leaves, 8.0 * b.x / leaves, 8.0 * b.f / leaves, 8.0 * b.s / leaves,
      a.zip ? (" zip " + std::to_string(zip_bytes)).c_str() : "", r.timings.total, r.timings.x,
      r.timings.f, r.timings.s, r.timings.mlps);
  return 0;
}

int run_decode(const std::string& input, const std::string& output, const std::string& format) {
  const DecodedContainer d = decode_container(read_file(input), env_threads());
  if (format == "ascii") {
    const std::string text = write_ascii(d.cloud);
    write_file(output, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  } else {
    write_file(output, write_native(d.cloud));
  }
  return 0;
}

ordered_json stats_json(const ContainerStats& st) {
  ordered_json j;
  j["schema_version"] = kStatsSchemaVersion;
  j["context"] = st.header.mode() == ContextMode::kNeural ? "neural" : "static";
  j["recursion"] = st.header.depth;
  j["n_f"] = st.header.n_f;
  j["splat_count"] = st.header.splat_count;
  j["chunk_size"] = st.header.chunk_size;
  j["sizes"] = {{"total", st.sizes.total}, {"x", st.sizes.x},       {"f", st.sizes.f},
                {"s", st.sizes.s},         {"mlps", st.sizes.mlps}, {"other", st.sizes.other},
                {"zip", st.zip_bytes}};
  j["bits_per_splat"] = {{"total", st.bits_per_splat(st.sizes.total)},
                         {"x", st.bits_per_splat(st.sizes.x)},
                         {"f", st.bits_per_splat(st.sizes.f)},
                         {"s", st.bits_per_splat(st.sizes.s)}};
  ordered_json levels = ordered_json::array();
  for (std::size_t l = 0; l < st.occupancy.popcount_per_level.size(); ++l) {
    const auto& h = st.occupancy.popcount_per_level[l];
    std::uint64_t bytes = 0;
    for (auto c : h) bytes += c;
    levels.push_back({{"level", l},
                      {"bytes", bytes},
                      {"mean_popcount", st.occupancy.mean_popcount(l)},
                      {"popcount_histogram", h}});
  }
  ordered_json top = ordered_json::array();
  for (const auto& [value, count] : st.top_bytes) top.push_back({{"value", value}, {"count", count}});
  j["octree"] = {{"occupancy_bytes", st.occupancy_byte_count}, {"levels", levels}, {"top_bytes", top}};
  auto rate = [](const StreamRate& r) {
    return ordered_json{{"nll_bits", r.model.nll_bits_total},
                        {"nll_bits_per_splat", r.model.nll_bits_per_splat},
                        {"wide_bin_nll_bits", r.model.paper_nll_total},
                        {"actual_bits", r.actual_bits}};
  };
  j["rate"] = {{"features", rate(st.features)}, {"scaling", rate(st.scaling)}};
  j["decode_seconds"] = {{"total", st.decode_timings.total}, {"x", st.decode_timings.x},
                         {"f", st.decode_timings.f},         {"s", st.decode_timings.s},
                         {"mlps", st.decode_timings.mlps}};
  return j;
}

void print_stats(const ContainerStats& st) {
  const auto& s = st.sizes;
  const double mb = 1.0 / (1024.0 * 1024.0);
  std::printf("context %s  R=%d  n_f=%d  splats %llu\n\n",
              st.header.mode() == ContextMode::kNeural ? "neural" : "static", st.header.depth,
              st.header.n_f, static_cast<unsigned long long>(st.header.splat_count));
  std::printf("%-10s %12s %12s %12s\n", "component", "bytes", "MB", "bits/splat");
  auto row = [&](const char* name, std::uint64_t bytes) {
    std::printf("%-10s %12llu %12.6f %12.4f\n", name, static_cast<unsigned long long>(bytes),
                bytes * mb, st.bits_per_splat(bytes));
  };
  row("Total", s.total);
  row("x", s.x);
  row("f", s.f);
  row("s", s.s);
  row("MLPs", s.mlps);
  row("Others", s.other);
  std::printf("sum of sections %llu = file size %llu; zipped %llu\n\n",
              static_cast<unsigned long long>(s.x + s.f + s.s + s.mlps + s.other),
              static_cast<unsigned long long>(s.total),
              static_cast<unsigned long long>(st.zip_bytes));

  std::printf("occupancy popcount histogram per level (%llu bytes)\n",
              static_cast<unsigned long long>(st.occupancy_byte_count));
  std::printf("%5s %10s %6s", "level", "bytes", "mean");
  for (int k = 1; k <= 8; ++k) std::printf(" %9d", k);
  std::printf("\n");
  for (std::size_t l = 0; l < st.occupancy.popcount_per_level.size(); ++l) {
    const auto& h = st.occupancy.popcount_per_level[l];
    std::uint64_t bytes = 0;
    for (auto c : h) bytes += c;
    std::printf("%5zu %10llu %6.3f", l, static_cast<unsigned long long>(bytes),
                st.occupancy.mean_popcount(l));
    for (int k = 1; k <= 8; ++k) std::printf(" %9llu", static_cast<unsigned long long>(h[k]));
    std::printf("\n");
  }
  std::printf("\ntop occupancy byte values\n");
  for (const auto& [value, count] : st.top_bytes) {
    std::printf("  0x%02X %10llu\n", value, static_cast<unsigned long long>(count));
  }
  std::printf("\n%-9s %14s %14s %14s %10s\n", "stream", "NLL bits", "actual bits", "overhead",
              "bits/splat");
  for (const auto& [name, r] : {std::pair{"features", &st.features}, std::pair{"scaling", &st.scaling}}) {
    std::printf("%-9s %14.1f %14llu %13.3f%% %10.4f\n", name, r->model.nll_bits_total,
                static_cast<unsigned long long>(r->actual_bits),
                r->model.nll_bits_total > 0
                    ? 100.0 * (r->actual_bits / r->model.nll_bits_total - 1.0)
                    : 0.0,
                r->model.nll_bits_per_splat);
  }
}

int run_stats(const std::string& input, bool json) {
  const ContainerStats st = container_stats(read_file(input), env_threads());
  if (json) {
    std::cout << stats_json(st).dump(2) << "\n";
  } else {
    print_stats(st);
  }
  return 0;
}

Vec3 parse_camera(const std::string& text) {
  Vec3 c{};
  std::istringstream in(text);
  std::string part;
  int k = 0;
  while (std::getline(in, part, ',')) {
    if (k == 3) fail(ErrorCode::kInvalidConfig, "--camera takes exactly X,Y,Z");
    std::size_t used = 0;
    try {
      c[k] = std::stod(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != part.size()) fail(ErrorCode::kInvalidConfig, "bad --camera value '" + part + "'");
    ++k;
  }
  if (k != 3) fail(ErrorCode::kInvalidConfig, "--camera takes exactly X,Y,Z");
  return c;
}

int run_materialize(const std::string& input, const std::string& camera, const std::string& output) {
  const Vec3 cam = parse_camera(camera);
  const DecodedContainer d = decode_container(read_file(input), env_threads());
  if (!d.model) fail(ErrorCode::kNoModel, "no neural model in a static-context container");
  std::vector<Vec3> positions;
  std::vector<SplatAttributes> attrs;
  positions.reserve(d.cloud.size());
  attrs.reserve(d.cloud.size());
  for (const Splat& s : d.cloud.splats) {
    positions.push_back(s.x);
    attrs.push_back(decode_attributes(s.f, s.s, s.x, cam, &*d.model));
  }
  write_file(output, write_attribute_ply(positions, attrs));
  return 0;
}

int run_fixture(const std::string& kind, std::size_t count, int nf, std::uint64_t seed,
                const std::string& output) {
  const Fixture f = make_fixture(parse_fixture_kind(kind), count, nf, seed);
  write_file(output, write_native(f.cloud));
  return 0;
}

int run_init_weights(int nf, std::uint64_t seed, bool zero, int log2_2d, int log2_3d,
                     const std::string& output) {
  HashGridConfig hash;
  if (log2_2d < 1 || log2_2d > 24 || log2_3d < 1 || log2_3d > 24) {
    fail(ErrorCode::kInvalidConfig, "table sizes must be 2^1 .. 2^24");
  }
  hash.log2_table_2d = static_cast<std::uint32_t>(log2_2d);
  hash.log2_table_3d = static_cast<std::uint32_t>(log2_3d);
  const NeuralModel m = zero ? zero_model(nf, hash) : random_model(nf, seed, hash);
  write_file(output, serialize_model(m));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-splat scene codec"};
  app.require_subcommand(1);

  EncodeArgs enc;
  auto* encode = app.add_subcommand("encode", "Compress a splat file into a container");
  encode->add_option("--input", enc.input, "SPLT, binary PLY or ASCII xyz file")->required();
  encode->add_option("--output", enc.output, "Container path")->required();
  encode->add_option("--recursion", enc.recursion, "Octree depth R")->check(CLI::Range(1, 21));
  auto* nf_opt = encode->add_option("--nf", enc.nf, "Feature width (from the file for SPLT input)")
                     ->check(CLI::Range(1, 255));
  encode->add_option("--context", enc.context, "Entropy-model context")
      ->check(CLI::IsMember({"static", "neural"}));
  encode->add_option("--weights", enc.weights, "Decoder weights (neural context)");
  encode->add_option("--chunk", enc.chunk, "Splats per range-coded chunk")->check(CLI::PositiveNumber);
  encode->add_flag("--zip", enc.zip, "Also write OUTPUT.zip with one entry per section");

  std::string dec_in, dec_out, dec_format = "native";
  auto* decode = app.add_subcommand("decode", "Reconstruct the quantized cloud");
  decode->add_option("--input", dec_in)->required();
  decode->add_option("--output", dec_out)->required();
  decode->add_option("--format", dec_format)->check(CLI::IsMember({"native", "ascii"}));

  std::string stats_in;
  bool stats_json_flag = false;
  auto* stats = app.add_subcommand("stats", "Size breakdown, octree statistics and rates");
  stats->add_option("--input", stats_in)->required();
  stats->add_flag("--json", stats_json_flag, "Machine-readable output");

  std::string mat_in, mat_cam, mat_out;
  auto* materialize =
      app.add_subcommand("materialize", "Per-splat attributes for one camera position, as PLY");
  materialize->add_option("--input", mat_in)->required();
  materialize->add_option("--camera", mat_cam, "X,Y,Z")->required();
  materialize->add_option("--output", mat_out)->required();

  std::string fx_kind, fx_out;
  std::size_t fx_count = 0;
  int fx_nf = 8;
  std::uint64_t fx_seed = 0;
  auto* fixture = app.add_subcommand("fixture", "Write a deterministic synthetic cloud (SPLT)");
  fixture->add_option("--kind", fx_kind, "sphere | cube | gaussian-mixture")->required();
  fixture->add_option("--count", fx_count)->required();
  fixture->add_option("--nf", fx_nf)->check(CLI::Range(1, 255));
  fixture->add_option("--seed", fx_seed);
  fixture->add_option("--output", fx_out)->required();

  std::string w_out;
  int w_nf = 8, w_log2_2d = 15, w_log2_3d = 13;
  std::uint64_t w_seed = 0;
  bool w_zero = false;
  auto* weights = app.add_subcommand("init-weights", "Write untrained decoder weights");
  weights->add_option("--nf", w_nf)->check(CLI::Range(1, 255));
  weights->add_option("--seed", w_seed);
  weights->add_flag("--zero", w_zero, "All-zero weights instead of random ones");
  weights->add_option("--log2-table-2d", w_log2_2d);
  weights->add_option("--log2-table-3d", w_log2_3d);
  weights->add_option("--output", w_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*encode) return run_encode(enc, nf_opt->count() > 0);
    if (*decode) return run_decode(dec_in, dec_out, dec_format);
    if (*stats) return run_stats(stats_in, stats_json_flag);
    if (*materialize) return run_materialize(mat_in, mat_cam, mat_out);
    if (*fixture) return run_fixture(fx_kind, fx_count, fx_nf, fx_seed, fx_out);
    if (*weights) return run_init_weights(w_nf, w_seed, w_zero, w_log2_2d, w_log2_3d, w_out);
  } catch (const CodecError& e) {
    std::cerr << "smolgs: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "smolgs: " << e.what() << "\n";
    return kExitParse;
  }
  return 0;
}
