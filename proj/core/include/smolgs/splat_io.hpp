#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "smolgs/bytes.hpp"
#include "smolgs/neural.hpp"
#include "smolgs/types.hpp"

namespace smolgs {

// Native "SPLT" layout: magic | n_f u8 | 3 reserved bytes | count u64, then
// little-endian f32 records [x, y, z, f[n_f], s[3]].
inline constexpr std::size_t kNativeHeaderSize = 16;

enum class SplatFormat { kNative, kPly, kAscii };

/// By magic: "SPLT" is native, "ply" is PLY, anything else is ASCII xyz.
SplatFormat detect_format(std::span<const std::uint8_t> bytes);

Bytes write_native(const SplatCloud& cloud);
/// n_f comes from the file header.
SplatCloud read_native(std::span<const std::uint8_t> bytes);

/// Binary little-endian 3DGS PLY. Lossy adapter: f = [f_dc_0..2, opacity,
/// rot_0..3] truncated or zero-padded to n_f, s = exp(scale_0..2); f_rest_*
/// is ignored. Throws kParseError naming the first missing property.
SplatCloud read_ply(std::span<const std::uint8_t> bytes, int n_f);

/// Whitespace-separated "x y z" (zero f and s) or full "x y z f... s..."
/// records per line, as write_ascii emits them; '#' comments.
SplatCloud read_ascii(std::span<const std::uint8_t> bytes, int n_f);

/// One line per splat: x y z f... s..., each as %.17g.
std::string write_ascii(const SplatCloud& cloud);

/// Dispatches on detect_format. For native input n_f is taken from the file.
SplatCloud read_splats(std::span<const std::uint8_t> bytes, int n_f);

/// Flattened per-splat records for external renderers: x, y, z, red, green,
/// blue, opacity (clamped at 0), scale_0..2, rot_0..3 as f32.
Bytes write_attribute_ply(const std::vector<Vec3>& positions,
                          const std::vector<SplatAttributes>& attributes);

Bytes read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> data);

}  // namespace smolgs
