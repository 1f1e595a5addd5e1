#include "smolgs/stats.hpp"

#include <algorithm>

#include "smolgs/zip_export.hpp"

namespace smolgs {

ContainerStats container_stats(std::span<const std::uint8_t> bytes, unsigned threads,
                               std::size_t top_n) {
  const DecodedContainer decoded = decode_container(bytes, threads);
  const CodecConfig defaults;
  ContainerStats st;
  st.header = decoded.header;
  st.sizes = size_breakdown(bytes);
  st.zip_bytes = container_zip(bytes).size();
  st.occupancy_byte_count = decoded.octree.occupancy_bytes.size();
  st.occupancy = occupancy_statistics(decoded.octree);
  for (int v = 0; v < 256; ++v) {
    if (st.occupancy.byte_frequency[v] > 0) {
      st.top_bytes.emplace_back(static_cast<std::uint8_t>(v), st.occupancy.byte_frequency[v]);
    }
  }
  std::stable_sort(st.top_bytes.begin(), st.top_bytes.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (st.top_bytes.size() > top_n) st.top_bytes.resize(top_n);
  st.features.model =
      rate_report(decoded.features, decoded.feature_context, defaults.min_bin_probability);
  st.features.actual_bits = 8 * decoded.feature_coded_bytes;
  st.scaling.model =
      rate_report(decoded.scaling, decoded.scaling_context, defaults.min_bin_probability);
  st.scaling.actual_bits = 8 * decoded.scaling_coded_bytes;
  st.decode_timings = decoded.timings;
  return st;
}

}  // namespace smolgs
