#include <benchmark/benchmark.h>

#include <map>

#include "smolgs/container.hpp"
#include "smolgs/fixtures.hpp"
#include "smolgs/huffman.hpp"
#include "smolgs/neural.hpp"
#include "smolgs/octree.hpp"
#include "smolgs/range_coder.hpp"

namespace {

using namespace smolgs;

const SplatCloud& sphere(std::size_t n) {
  static std::map<std::size_t, SplatCloud> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_fixture(FixtureKind::kSphere, n, 8, 1).cloud).first;
  return it->second;
}

void BM_BuildOctree(benchmark::State& state) {
  const SplatCloud& c = sphere(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_octree(c, 16));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildOctree)->Arg(10000)->Arg(100000);

void BM_DecodeOctree(benchmark::State& state) {
  const OctreeStream s = build_octree(sphere(static_cast<std::size_t>(state.range(0))), 16).stream;
  for (auto _ : state) benchmark::DoNotOptimize(decode_octree_codes(s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DecodeOctree)->Arg(10000)->Arg(100000);

void BM_Huffman(benchmark::State& state) {
  const Bytes data = build_octree(sphere(100000), 16).stream.occupancy_bytes;
  const HuffmanTable t = huffman_build(byte_histogram(data));
  for (auto _ : state) {
    const HuffmanBits bits = huffman_encode(data, t);
    benchmark::DoNotOptimize(huffman_decode(bits.bytes, bits.bit_count, t, data.size()));
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(data.size()));
}
BENCHMARK(BM_Huffman);

void BM_RangeCoder(benchmark::State& state) {
  std::vector<double> p(64);
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = 1.0 / (1.0 + static_cast<double>(k));
  const SymbolModel m = quantize_frequencies(p);
  std::vector<std::uint32_t> syms(1 << 20);
  for (std::size_t i = 0; i < syms.size(); ++i) syms[i] = static_cast<std::uint32_t>((i * 2654435761u) % 17);
  const ModelProvider models = [&](std::size_t) -> const SymbolModel& { return m; };
  for (auto _ : state) {
    const Bytes b = range_encode(syms, models);
    benchmark::DoNotOptimize(range_decode(b, models, syms.size()));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(syms.size()));
}
BENCHMARK(BM_RangeCoder);

void BM_EncodeStatic(benchmark::State& state) {
  const SplatCloud& c = sphere(static_cast<std::size_t>(state.range(0)));
  EncodeOptions opt;
  opt.threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(encode_container_detailed(c, opt));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EncodeStatic)->Args({10000, 1})->Args({100000, 1})->Args({100000, 4})->Unit(benchmark::kMillisecond);

void BM_DecodeStatic(benchmark::State& state) {
  const Bytes b = encode_container(sphere(100000), CodecConfig{}, ContextMode::kStatic);
  for (auto _ : state) benchmark::DoNotOptimize(decode_container(b));
  state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_DecodeStatic)->Unit(benchmark::kMillisecond);

void BM_EncodeNeural(benchmark::State& state) {
  const SplatCloud& c = sphere(2000);
  const NeuralModel m = random_model(8, 1);
  EncodeOptions opt;
  opt.mode = ContextMode::kNeural;
  opt.model = &m;
  opt.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(encode_container_detailed(c, opt));
  state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_EncodeNeural)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_DecodeAttributes(benchmark::State& state) {
  const NeuralModel m = random_model(8, 2);
  const std::vector<double> f{0.1, -0.2, 0.3, 0.4, -0.5, 0.6, 0.7, -0.8};
  for (auto _ : state) benchmark::DoNotOptimize(decode_attributes(f, {0.01, 0.02, 0.03}, {0, 0, 0}, {1, 2, 3}, &m));
}
BENCHMARK(BM_DecodeAttributes);

}  // namespace
BENCHMARK_MAIN();
