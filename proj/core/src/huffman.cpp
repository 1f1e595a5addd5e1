#include "smolgs/huffman.hpp"

#include <algorithm>
#include <queue>
#include <string>
#include <tuple>
#include <vector>

#include "smolgs/error.hpp"

namespace smolgs {

namespace {

struct Node {
  std::uint64_t weight;
  int min_symbol;
  int left;
  int right;
};

std::array<std::uint8_t, 256> huffman_lengths(std::span<const std::uint64_t, 256> freq) {
  std::vector<Node> nodes;
  using Key = std::tuple<std::uint64_t, int, int>;  // weight, min symbol, node id
  std::priority_queue<Key, std::vector<Key>, std::greater<>> heap;
  for (int s = 0; s < 256; ++s) {
    if (freq[static_cast<std::size_t>(s)] == 0) continue;
    nodes.push_back({freq[static_cast<std::size_t>(s)], s, -1, -1});
    heap.emplace(nodes.back().weight, s, static_cast<int>(nodes.size() - 1));
  }
  std::array<std::uint8_t, 256> lengths{};
  if (nodes.empty()) fail(ErrorCode::kEmptyAlphabet, "all symbol frequencies are zero");
  if (nodes.size() == 1) {
    lengths[static_cast<std::size_t>(nodes.front().min_symbol)] = 1;
    return lengths;
  }
  while (heap.size() > 1) {
    const auto [wa, sa, a] = heap.top();
    heap.pop();
    const auto [wb, sb, b] = heap.top();
    heap.pop();
    nodes.push_back({wa + wb, std::min(sa, sb), a, b});
    heap.emplace(wa + wb, std::min(sa, sb), static_cast<int>(nodes.size() - 1));
  }
  // Iterative depth assignment from the root.
  std::vector<std::pair<int, int>> stack{{std::get<2>(heap.top()), 0}};
  while (!stack.empty()) {
    const auto [id, depth] = stack.back();
    stack.pop_back();
    const Node& n = nodes[static_cast<std::size_t>(id)];
    if (n.left < 0) {
      lengths[static_cast<std::size_t>(n.min_symbol)] =
          static_cast<std::uint8_t>(std::min(depth, 255));
    } else {
      stack.emplace_back(n.left, depth + 1);
      stack.emplace_back(n.right, depth + 1);
    }
  }
  return lengths;
}

}  // namespace

HuffmanTable HuffmanTable::from_lengths(std::span<const std::uint8_t, 256> lengths) {
  HuffmanTable t;
  std::copy(lengths.begin(), lengths.end(), t.lengths_.begin());
  long double kraft = 0;
  int present = 0;
  for (std::uint8_t len : lengths) {
    if (len == 0) continue;
    if (len > kMaxHuffmanLength) {
      fail(ErrorCode::kCorruptStream, "huffman code length exceeds 56");
    }
    kraft += 1.0L / static_cast<long double>(1ULL << len);
    ++present;
    t.max_length_ = std::max<int>(t.max_length_, len);
  }
  if (present == 0) fail(ErrorCode::kCorruptStream, "huffman table has no symbols");
  if (kraft > 1.0L) fail(ErrorCode::kCorruptStream, "huffman lengths violate the Kraft sum");

  std::uint16_t n = 0;
  for (int len = 1; len <= t.max_length_; ++len) {
    t.first_index_[len] = n;
    for (int s = 0; s < 256; ++s) {
      if (lengths[static_cast<std::size_t>(s)] == len) {
        t.sorted_symbols_[n++] = static_cast<std::uint8_t>(s);
        ++t.count_[len];
      }
    }
  }
  std::uint64_t code = 0;
  for (int len = 1; len <= t.max_length_; ++len) {
    t.first_code_[len] = code;
    for (std::uint16_t k = 0; k < t.count_[len]; ++k) {
      t.codes_[t.sorted_symbols_[t.first_index_[len] + k]] = code + k;
    }
    code = (code + t.count_[len]) << 1;
  }
  return t;
}

std::uint8_t HuffmanTable::decode_symbol(BitReader& reader) const {
  std::uint64_t code = 0;
  for (int len = 1; len <= max_length_; ++len) {
    code = (code << 1) | reader.get();
    if (code >= first_code_[len] && code - first_code_[len] < count_[len]) {
      return sorted_symbols_[first_index_[len] + (code - first_code_[len])];
    }
  }
  fail(ErrorCode::kCorruptStream, "bit pattern matches no huffman code");
}

HuffmanTable huffman_build(std::span<const std::uint64_t, 256> frequencies) {
  std::array<std::uint64_t, 256> freq;
  std::copy(frequencies.begin(), frequencies.end(), freq.begin());
  for (;;) {
    const auto lengths = huffman_lengths(freq);
    if (*std::max_element(lengths.begin(), lengths.end()) <= kMaxHuffmanLength) {
      return HuffmanTable::from_lengths(lengths);
    }
    // Only reachable with Fibonacci-like counts beyond ~10^11; flatten and retry.
    for (auto& f : freq) {
      if (f != 0) f = (f >> 1) | 1u;
    }
  }
}

std::array<std::uint64_t, 256> byte_histogram(std::span<const std::uint8_t> data) {
  std::array<std::uint64_t, 256> h{};
  for (std::uint8_t b : data) ++h[b];
  return h;
}

HuffmanBits huffman_encode(std::span<const std::uint8_t> data, const HuffmanTable& table) {
  BitWriter writer;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::uint8_t sym = data[i];
    if (table.length(sym) == 0) {
      fail(ErrorCode::kUnknownSymbol, "symbol " + std::to_string(sym) + " at position " +
                                          std::to_string(i) + " has no huffman code");
    }
    writer.put(table.code(sym), table.length(sym));
  }
  HuffmanBits out;
  out.bit_count = writer.bit_count();
  out.bytes = writer.take();
  return out;
}

Bytes huffman_decode(std::span<const std::uint8_t> bits, std::uint64_t bit_count,
                     const HuffmanTable& table, std::size_t count) {
  if (bit_count > static_cast<std::uint64_t>(bits.size()) * 8) {
    fail(ErrorCode::kCorruptStream, "declared bit count exceeds the buffer");
  }
  BitReader reader(bits, bit_count);
  Bytes out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(table.decode_symbol(reader));
  if (reader.remaining() != 0) {
    fail(ErrorCode::kCorruptStream,
         std::to_string(reader.remaining()) + " unread bits after huffman decode");
  }
  return out;
}

std::uint64_t huffman_cost(std::span<const std::uint64_t, 256> frequencies,
                           const HuffmanTable& table) {
  std::uint64_t bits = 0;
  for (std::size_t s = 0; s < 256; ++s) bits += frequencies[s] * table.code_lengths()[s];
  return bits;
}

}  // namespace smolgs
