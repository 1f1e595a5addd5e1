#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smolgs/bytes.hpp"
#include "smolgs/feature_codec.hpp"
#include "smolgs/types.hpp"

namespace smolgs {

enum class Activation : std::uint8_t { kNone = 0, kRelu = 1, kTanh = 2, kSigmoid = 3 };

struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;  // out x in, row-major
  std::vector<double> bias;     // out
};

/// Fully connected net: ReLU after every hidden layer, `output_activation`
/// after the last.
struct MlpSpec {
  std::vector<DenseLayer> layers;
  Activation output_activation = Activation::kNone;

  std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().in; }
  std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().out; }
  /// Throws kShapeError on inconsistent layer shapes.
  void validate() const;
};

/// Zero-initialised net with the given layer widths (dims.size() - 1 layers).
MlpSpec make_mlp(std::span<const std::size_t> dims, Activation output_activation);

std::vector<double> mlp_forward(const MlpSpec& spec, std::span<const double> input);

/// Binary hash table: entries x features bits, each decoding to +scale or
/// -scale.
struct HashTable {
  std::uint32_t log2_size = 0;
  std::uint32_t features = 4;
  double scale = 0.0;
  std::vector<std::uint8_t> bits;  // bit (entry*features + feature), LSB first

  static HashTable filled(std::uint32_t log2_size, std::uint32_t features, double scale,
                          bool positive);
  std::uint32_t size() const { return 1u << log2_size; }
  bool bit(std::uint32_t entry, std::uint32_t feature) const {
    const std::size_t i = static_cast<std::size_t>(entry) * features + feature;
    return (bits[i >> 3] >> (i & 7u)) & 1u;
  }
  void set_bit(std::uint32_t entry, std::uint32_t feature, bool on);
  double value(std::uint32_t entry, std::uint32_t feature) const {
    return bit(entry, feature) ? scale : -scale;
  }
};

struct HashGridConfig {
  std::uint32_t features_per_level = 4;
  std::uint32_t log2_table_2d = 15;
  std::vector<std::uint32_t> resolutions_2d{130, 258, 514, 1026};
  std::uint32_t log2_table_3d = 13;
  std::vector<std::uint32_t> resolutions_3d{18, 24, 33, 44, 59, 80, 108, 148, 201, 275, 376, 514};

  std::size_t output_dim() const {
    return features_per_level * (3 * resolutions_2d.size() + resolutions_3d.size());
  }
  friend bool operator==(const HashGridConfig&, const HashGridConfig&) = default;
};

enum class Plane : std::size_t { kXY = 0, kYZ = 1, kXZ = 2 };

/// Multiresolution hash grid with binary entries. tables_2d holds one table
/// per (level, plane), level-major; tables_3d one per level.
struct HashEncoderSpec {
  HashGridConfig config;
  std::vector<HashTable> tables_2d;
  std::vector<HashTable> tables_3d;

  static HashEncoderSpec filled(const HashGridConfig& config, double scale, bool positive);
  HashTable& table_2d(std::size_t level, Plane plane) {
    return tables_2d[level * 3 + static_cast<std::size_t>(plane)];
  }
  const HashTable& table_2d(std::size_t level, Plane plane) const {
    return tables_2d[level * 3 + static_cast<std::size_t>(plane)];
  }
  void validate() const;
};

std::uint32_t spatial_hash_2d(std::uint32_t a, std::uint32_t b);
std::uint32_t spatial_hash_3d(std::uint32_t x, std::uint32_t y, std::uint32_t z);

/// Multilinear interpolation of hashed corner features. Output order: for
/// each 2D level, planes xy, yz, xz; then each 3D level; features_per_level
/// values per table. Throws kOutOfBounds unless x is in [0, 1]^3.
std::vector<double> hash_encode(const Vec3& x, const HashEncoderSpec& spec);

/// Where each predicted quantity starts in the context MLP's output.
struct ContextLayout {
  std::uint16_t mu_f = 0;
  std::uint16_t sigma_f = 0;
  std::uint16_t delta_f = 0;
  std::uint16_t mu_s = 0;
  std::uint16_t sigma_s = 0;
  std::uint16_t delta_s = 0;
  std::uint16_t output_dim = 0;

  /// [mu_f, sigma_f, delta_f] (n_f each) then [mu_s, sigma_s, delta_s] (3 each).
  static ContextLayout standard(int n_f);
  void validate(int n_f) const;
  friend bool operator==(const ContextLayout&, const ContextLayout&) = default;
};

/// Decoder weights: four attribute nets on f* = [f, view dir, distance], the
/// context net on the hash encoding, and the binary hash grid.
struct NeuralModel {
  int n_f = 8;
  MlpSpec opacity;
  MlpSpec color;
  MlpSpec rotation;
  MlpSpec scaling;
  MlpSpec context;
  HashEncoderSpec hash;
  ContextLayout layout;

  /// Throws kNoModel if any net or the layout is inconsistent with n_f.
  void validate() const;
};

inline constexpr std::size_t kHiddenWidth = 128;

/// All-zero weights with the standard architecture (useful as a baseline).
NeuralModel zero_model(int n_f, const HashGridConfig& hash_config = {});

/// Randomly initialised (untrained) weights, reproducible from the seed.
/// Values are float32-representable so they survive serialization exactly.
NeuralModel random_model(int n_f, std::uint64_t seed, const HashGridConfig& hash_config = {});

Bytes serialize_model(const NeuralModel& model);
NeuralModel deserialize_model(std::span<const std::uint8_t> data);

/// [f, (x_c - x)/|x_c - x|, |x_c - x|]. Throws kDegenerateView when x == x_c.
std::vector<double> view_concat(std::span<const double> f, const Vec3& x, const Vec3& x_c);

using Mat3 = std::array<std::array<double, 3>, 3>;

struct SplatAttributes {
  double opacity = 0.0;
  Vec3 color{};
  std::array<double, 4> rotation{1.0, 0.0, 0.0, 0.0};  // unit quaternion (w, x, y, z)
  Vec3 scale{};
  Mat3 covariance{};
};

Mat3 quaternion_to_matrix(const std::array<double, 4>& q);

/// R diag(scale)^2 R^T, exactly symmetric.
Mat3 covariance_from(const std::array<double, 4>& unit_q, const Vec3& scale);

SplatAttributes decode_attributes(std::span<const double> f, const Vec3& s, const Vec3& x,
                                  const Vec3& x_c, const NeuralModel* model);

/// Maps a point of `bbox` into the unit cube.
Vec3 normalize_to_unit(const Vec3& x, const BoundingBox& bbox);

struct PredictedContext {
  QuantParams features;
  QuantParams scaling;
};

/// Context net on hash_encode(unit_x); sigma and delta pass through softplus
/// and are then floored.
PredictedContext predict_context(const Vec3& unit_x, const NeuralModel& model,
                                 double sigma_floor, double delta_floor);

}  // namespace smolgs
