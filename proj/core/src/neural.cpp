#include "smolgs/neural.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "smolgs/detmath.hpp"
#include "smolgs/error.hpp"
#include "smolgs/random.hpp"

namespace smolgs {

namespace {

constexpr char kWeightsMagic[4] = {'S', 'G', 'W', 'T'};
constexpr std::uint16_t kWeightsVersion = 1;

double activate(Activation a, double v) {
  switch (a) {
    case Activation::kNone: return v;
    case Activation::kRelu: return v > 0.0 ? v : 0.0;
    case Activation::kTanh: return std::tanh(v);
    case Activation::kSigmoid: return detmath::sigmoid(v);
  }
  return v;
}

void check_unit(const Vec3& x) {
  for (double v : x) {
    if (!(v >= 0.0 && v <= 1.0)) {
      fail(ErrorCode::kOutOfBounds, "hash_encode input must lie in [0, 1]^3");
    }
  }
}

// Cell index and fractional offset of t in [0, 1] on a grid with `res`
// vertices per axis.
std::pair<std::uint32_t, double> grid_cell(double t, std::uint32_t res) {
  const double pos = t * static_cast<double>(res - 1);
  double cell = std::floor(pos);
  const auto last = static_cast<double>(res - 2);
  if (cell > last) cell = last;
  return {static_cast<std::uint32_t>(cell), pos - cell};
}

void interpolate_2d(const HashTable& table, std::uint32_t res, double a, double b,
                    std::vector<double>& out) {
  const auto [ia, fa] = grid_cell(a, res);
  const auto [ib, fb] = grid_cell(b, res);
  const std::size_t base = out.size();
  out.resize(base + table.features, 0.0);
  const std::uint32_t mask = table.size() - 1;
  for (unsigned corner = 0; corner < 4; ++corner) {
    const unsigned da = corner & 1u;
    const unsigned db = (corner >> 1) & 1u;
    const double w = (da ? fa : 1.0 - fa) * (db ? fb : 1.0 - fb);
    const std::uint32_t entry = spatial_hash_2d(ia + da, ib + db) & mask;
    for (std::uint32_t k = 0; k < table.features; ++k) out[base + k] += w * table.value(entry, k);
  }
}

void interpolate_3d(const HashTable& table, std::uint32_t res, const Vec3& x,
                    std::vector<double>& out) {
  const auto [ix, fx] = grid_cell(x[0], res);
  const auto [iy, fy] = grid_cell(x[1], res);
  const auto [iz, fz] = grid_cell(x[2], res);
  const std::size_t base = out.size();
  out.resize(base + table.features, 0.0);
  const std::uint32_t mask = table.size() - 1;
  for (unsigned corner = 0; corner < 8; ++corner) {
    const unsigned dx = corner & 1u;
    const unsigned dy = (corner >> 1) & 1u;
    const unsigned dz = (corner >> 2) & 1u;
    const double w = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy) * (dz ? fz : 1.0 - fz);
    const std::uint32_t entry = spatial_hash_3d(ix + dx, iy + dy, iz + dz) & mask;
    for (std::uint32_t k = 0; k < table.features; ++k) out[base + k] += w * table.value(entry, k);
  }
}

void validate_attribute_net(const MlpSpec& mlp, const char* name, std::size_t in,
                            std::size_t out, Activation act) {
  try {
    mlp.validate();
  } catch (const CodecError& e) {
    fail(ErrorCode::kNoModel, std::string(name) + " net: " + e.what());
  }
  if (mlp.layers.size() != 3 || mlp.input_dim() != in || mlp.output_dim() != out ||
      mlp.layers[0].out != kHiddenWidth || mlp.layers[1].out != kHiddenWidth ||
      mlp.output_activation != act) {
    fail(ErrorCode::kNoModel, std::string(name) + " net does not match the expected architecture");
  }
}

float random_weight(SplitMix64& rng, double limit) {
  return static_cast<float>(rng.uniform(-limit, limit));
}

MlpSpec random_mlp(SplitMix64& rng, std::size_t in, std::size_t out, Activation act) {
  const std::size_t dims[] = {in, kHiddenWidth, kHiddenWidth, out};
  MlpSpec mlp = make_mlp(dims, act);
  for (DenseLayer& layer : mlp.layers) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
    for (double& w : layer.weights) w = random_weight(rng, limit);
    for (double& b : layer.bias) b = random_weight(rng, 0.1);
  }
  return mlp;
}

void write_mlp(ByteWriter& w, const std::string& name, const MlpSpec& mlp) {
  w.u8(static_cast<std::uint8_t>(name.size()));
  w.str(name);
  w.u8(static_cast<std::uint8_t>(mlp.output_activation));
  w.u8(static_cast<std::uint8_t>(mlp.layers.size()));
  for (const DenseLayer& layer : mlp.layers) {
    w.u32(static_cast<std::uint32_t>(layer.in));
    w.u32(static_cast<std::uint32_t>(layer.out));
    for (double v : layer.weights) w.f32(static_cast<float>(v));
    for (double v : layer.bias) w.f32(static_cast<float>(v));
  }
}

std::pair<std::string, MlpSpec> read_mlp(ByteReader& r) {
  std::string name = r.str(r.u8());
  MlpSpec mlp;
  const std::uint8_t act = r.u8();
  if (act > static_cast<std::uint8_t>(Activation::kSigmoid)) {
    fail(ErrorCode::kCorruptStream, "unknown activation tag in weights");
  }
  mlp.output_activation = static_cast<Activation>(act);
  const std::uint8_t n_layers = r.u8();
  for (std::uint8_t l = 0; l < n_layers; ++l) {
    DenseLayer layer;
    layer.in = r.u32();
    layer.out = r.u32();
    const std::uint64_t n = static_cast<std::uint64_t>(layer.in) * layer.out;
    if (n * 4 > r.remaining()) fail(ErrorCode::kCorruptStream, "weights tensor truncated");
    layer.weights.resize(static_cast<std::size_t>(n));
    for (double& v : layer.weights) v = r.f32();
    layer.bias.resize(layer.out);
    for (double& v : layer.bias) v = r.f32();
    mlp.layers.push_back(std::move(layer));
  }
  return {std::move(name), std::move(mlp)};
}

void write_table(ByteWriter& w, const HashTable& t) {
  w.f32(static_cast<float>(t.scale));
  w.bytes(t.bits);
}

HashTable read_table(ByteReader& r, std::uint32_t log2_size, std::uint32_t features) {
  HashTable t;
  t.log2_size = log2_size;
  t.features = features;
  t.scale = r.f32();
  const std::size_t n = ((static_cast<std::size_t>(1) << log2_size) * features + 7) / 8;
  auto b = r.bytes(n);
  t.bits.assign(b.begin(), b.end());
  return t;
}

std::vector<std::uint32_t> read_resolutions(ByteReader& r) {
  std::vector<std::uint32_t> res(r.u8());
  for (auto& v : res) v = r.u32();
  return res;
}

void write_resolutions(ByteWriter& w, const std::vector<std::uint32_t>& res) {
  w.u8(static_cast<std::uint8_t>(res.size()));
  for (std::uint32_t v : res) w.u32(v);
}

}  // namespace

void MlpSpec::validate() const {
  if (layers.empty()) fail(ErrorCode::kShapeError, "MLP has no layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const DenseLayer& layer = layers[l];
    if (layer.in == 0 || layer.out == 0 || layer.weights.size() != layer.in * layer.out ||
        layer.bias.size() != layer.out) {
      fail(ErrorCode::kShapeError, "layer " + std::to_string(l) + " has inconsistent shapes");
    }
    if (l > 0 && layers[l - 1].out != layer.in) {
      fail(ErrorCode::kShapeError, "layer " + std::to_string(l) + " input does not chain");
    }
  }
}

MlpSpec make_mlp(std::span<const std::size_t> dims, Activation output_activation) {
  if (dims.size() < 2) fail(ErrorCode::kShapeError, "an MLP needs at least two widths");
  MlpSpec mlp;
  mlp.output_activation = output_activation;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    DenseLayer layer;
    layer.in = dims[l];
    layer.out = dims[l + 1];
    layer.weights.assign(layer.in * layer.out, 0.0);
    layer.bias.assign(layer.out, 0.0);
    mlp.layers.push_back(std::move(layer));
  }
  return mlp;
}

std::vector<double> mlp_forward(const MlpSpec& spec, std::span<const double> input) {
  if (spec.layers.empty() || input.size() != spec.input_dim()) {
    fail(ErrorCode::kShapeError, "MLP input has " + std::to_string(input.size()) +
                                     " values, expected " + std::to_string(spec.input_dim()));
  }
  std::vector<double> cur(input.begin(), input.end());
  std::vector<double> next;
  for (std::size_t l = 0; l < spec.layers.size(); ++l) {
    const DenseLayer& layer = spec.layers[l];
    const Activation act =
        l + 1 == spec.layers.size() ? spec.output_activation : Activation::kRelu;
    next.assign(layer.out, 0.0);
    for (std::size_t o = 0; o < layer.out; ++o) {
      const double* row = layer.weights.data() + o * layer.in;
      double acc = 0.0;
      for (std::size_t i = 0; i < layer.in; ++i) acc += row[i] * cur[i];
      next[o] = activate(act, acc + layer.bias[o]);
    }
    cur.swap(next);
  }
  return cur;
}

HashTable HashTable::filled(std::uint32_t log2_size, std::uint32_t features, double scale,
                            bool positive) {
  HashTable t;
  t.log2_size = log2_size;
  t.features = features;
  t.scale = scale;
  t.bits.assign(((static_cast<std::size_t>(1) << log2_size) * features + 7) / 8,
                positive ? 0xFF : 0x00);
  return t;
}

void HashTable::set_bit(std::uint32_t entry, std::uint32_t feature, bool on) {
  const std::size_t i = static_cast<std::size_t>(entry) * features + feature;
  const auto mask = static_cast<std::uint8_t>(1u << (i & 7u));
  if (on) {
    bits[i >> 3] |= mask;
  } else {
    bits[i >> 3] &= static_cast<std::uint8_t>(~mask);
  }
}

HashEncoderSpec HashEncoderSpec::filled(const HashGridConfig& config, double scale,
                                        bool positive) {
  HashEncoderSpec spec;
  spec.config = config;
  for (std::size_t l = 0; l < config.resolutions_2d.size() * 3; ++l) {
    spec.tables_2d.push_back(
        HashTable::filled(config.log2_table_2d, config.features_per_level, scale, positive));
  }
  for (std::size_t l = 0; l < config.resolutions_3d.size(); ++l) {
    spec.tables_3d.push_back(
        HashTable::filled(config.log2_table_3d, config.features_per_level, scale, positive));
  }
  return spec;
}

void HashEncoderSpec::validate() const {
  auto check = [&](const HashTable& t, std::uint32_t log2_size) {
    if (t.log2_size != log2_size || t.features != config.features_per_level ||
        t.bits.size() != ((static_cast<std::size_t>(1) << log2_size) * t.features + 7) / 8 ||
        !std::isfinite(t.scale)) {
      fail(ErrorCode::kShapeError, "hash table does not match the grid configuration");
    }
  };
  if (config.features_per_level == 0 || config.log2_table_2d > 30 || config.log2_table_3d > 30) {
    fail(ErrorCode::kShapeError, "invalid hash grid configuration");
  }
  if (tables_2d.size() != 3 * config.resolutions_2d.size() ||
      tables_3d.size() != config.resolutions_3d.size()) {
    fail(ErrorCode::kShapeError, "hash table count does not match the level count");
  }
  for (std::uint32_t r : config.resolutions_2d) {
    if (r < 2) fail(ErrorCode::kShapeError, "hash grid resolution must be at least 2");
  }
  for (std::uint32_t r : config.resolutions_3d) {
    if (r < 2) fail(ErrorCode::kShapeError, "hash grid resolution must be at least 2");
  }
  for (const auto& t : tables_2d) check(t, config.log2_table_2d);
  for (const auto& t : tables_3d) check(t, config.log2_table_3d);
}

std::uint32_t spatial_hash_2d(std::uint32_t a, std::uint32_t b) {
  return a ^ (b * 2654435761u);
}

std::uint32_t spatial_hash_3d(std::uint32_t x, std::uint32_t y, std::uint32_t z) {
  return x ^ (y * 2654435761u) ^ (z * 805459861u);
}

std::vector<double> hash_encode(const Vec3& x, const HashEncoderSpec& spec) {
  check_unit(x);
  std::vector<double> out;
  out.reserve(spec.config.output_dim());
  for (std::size_t l = 0; l < spec.config.resolutions_2d.size(); ++l) {
    const std::uint32_t res = spec.config.resolutions_2d[l];
    interpolate_2d(spec.table_2d(l, Plane::kXY), res, x[0], x[1], out);
    interpolate_2d(spec.table_2d(l, Plane::kYZ), res, x[1], x[2], out);
    interpolate_2d(spec.table_2d(l, Plane::kXZ), res, x[0], x[2], out);
  }
  for (std::size_t l = 0; l < spec.config.resolutions_3d.size(); ++l) {
    interpolate_3d(spec.tables_3d[l], spec.config.resolutions_3d[l], x, out);
  }
  return out;
}

ContextLayout ContextLayout::standard(int n_f) {
  const auto n = static_cast<std::uint16_t>(n_f);
  ContextLayout l;
  l.mu_f = 0;
  l.sigma_f = n;
  l.delta_f = static_cast<std::uint16_t>(2 * n);
  l.mu_s = static_cast<std::uint16_t>(3 * n);
  l.sigma_s = static_cast<std::uint16_t>(3 * n + 3);
  l.delta_s = static_cast<std::uint16_t>(3 * n + 6);
  l.output_dim = static_cast<std::uint16_t>(3 * n + 9);
  return l;
}

void ContextLayout::validate(int n_f) const {
  const auto nf = static_cast<std::uint32_t>(n_f);
  const std::pair<std::uint16_t, std::uint32_t> spans[] = {
      {mu_f, nf}, {sigma_f, nf}, {delta_f, nf}, {mu_s, 3}, {sigma_s, 3}, {delta_s, 3}};
  for (const auto& [offset, width] : spans) {
    if (static_cast<std::uint32_t>(offset) + width > output_dim) {
      fail(ErrorCode::kNoModel, "context layout record exceeds the context net output");
    }
  }
}

void NeuralModel::validate() const {
  if (n_f < 1 || n_f > 255) fail(ErrorCode::kNoModel, "model n_f out of range");
  const auto view_dim = static_cast<std::size_t>(n_f) + 4;
  validate_attribute_net(opacity, "opacity", view_dim, 1, Activation::kTanh);
  validate_attribute_net(color, "color", view_dim, 3, Activation::kSigmoid);
  validate_attribute_net(rotation, "rotation", view_dim, 4, Activation::kNone);
  validate_attribute_net(scaling, "scaling", view_dim, 3, Activation::kNone);
  try {
    hash.validate();
  } catch (const CodecError& e) {
    fail(ErrorCode::kNoModel, e.what());
  }
  validate_attribute_net(context, "context", hash.config.output_dim(), layout.output_dim,
                         Activation::kNone);
  layout.validate(n_f);
}

NeuralModel zero_model(int n_f, const HashGridConfig& hash_config) {
  NeuralModel m;
  m.n_f = n_f;
  m.layout = ContextLayout::standard(n_f);
  const std::size_t view_dim = static_cast<std::size_t>(n_f) + 4;
  auto net = [&](std::size_t in, std::size_t out, Activation act) {
    const std::size_t dims[] = {in, kHiddenWidth, kHiddenWidth, out};
    return make_mlp(dims, act);
  };
  m.opacity = net(view_dim, 1, Activation::kTanh);
  m.color = net(view_dim, 3, Activation::kSigmoid);
  m.rotation = net(view_dim, 4, Activation::kNone);
  m.scaling = net(view_dim, 3, Activation::kNone);
  m.hash = HashEncoderSpec::filled(hash_config, 0.0, true);
  m.context = net(hash_config.output_dim(), m.layout.output_dim, Activation::kNone);
  return m;
}

NeuralModel random_model(int n_f, std::uint64_t seed, const HashGridConfig& hash_config) {
  SplitMix64 rng(seed);
  NeuralModel m;
  m.n_f = n_f;
  m.layout = ContextLayout::standard(n_f);
  const std::size_t view_dim = static_cast<std::size_t>(n_f) + 4;
  m.opacity = random_mlp(rng, view_dim, 1, Activation::kTanh);
  m.color = random_mlp(rng, view_dim, 3, Activation::kSigmoid);
  m.rotation = random_mlp(rng, view_dim, 4, Activation::kNone);
  m.scaling = random_mlp(rng, view_dim, 3, Activation::kNone);
  m.hash = HashEncoderSpec::filled(hash_config, 0.0, false);
  for (auto* tables : {&m.hash.tables_2d, &m.hash.tables_3d}) {
    for (HashTable& t : *tables) {
      t.scale = static_cast<float>(rng.uniform(0.05, 0.5));
      for (auto& byte : t.bits) byte = static_cast<std::uint8_t>(rng.next());
    }
  }
  m.context = random_mlp(rng, hash_config.output_dim(), m.layout.output_dim, Activation::kNone);
  return m;
}

Bytes serialize_model(const NeuralModel& model) {
  model.validate();
  ByteWriter w;
  w.bytes(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(kWeightsMagic), 4));
  w.u16(kWeightsVersion);
  w.u8(static_cast<std::uint8_t>(model.n_f));
  const ContextLayout& l = model.layout;
  for (std::uint16_t v : {l.mu_f, l.sigma_f, l.delta_f, l.mu_s, l.sigma_s, l.delta_s, l.output_dim}) {
    w.u16(v);
  }
  w.u8(5);
  write_mlp(w, "opacity", model.opacity);
  write_mlp(w, "color", model.color);
  write_mlp(w, "rotation", model.rotation);
  write_mlp(w, "scaling", model.scaling);
  write_mlp(w, "context", model.context);
  const HashGridConfig& c = model.hash.config;
  w.u8(static_cast<std::uint8_t>(c.features_per_level));
  w.u8(static_cast<std::uint8_t>(c.log2_table_2d));
  write_resolutions(w, c.resolutions_2d);
  w.u8(static_cast<std::uint8_t>(c.log2_table_3d));
  write_resolutions(w, c.resolutions_3d);
  for (const HashTable& t : model.hash.tables_2d) write_table(w, t);
  for (const HashTable& t : model.hash.tables_3d) write_table(w, t);
  return w.take();
}

NeuralModel deserialize_model(std::span<const std::uint8_t> data) {
  ByteReader r(data, "weights");
  if (r.str(4) != std::string(kWeightsMagic, 4)) {
    fail(ErrorCode::kBadMagic, "weights blob does not start with SGWT");
  }
  if (r.u16() != kWeightsVersion) fail(ErrorCode::kUnsupportedVersion, "weights version");
  NeuralModel m;
  m.n_f = r.u8();
  ContextLayout& l = m.layout;
  for (std::uint16_t* v : {&l.mu_f, &l.sigma_f, &l.delta_f, &l.mu_s, &l.sigma_s, &l.delta_s,
                           &l.output_dim}) {
    *v = r.u16();
  }
  const std::uint8_t count = r.u8();
  bool seen[5] = {};
  for (std::uint8_t i = 0; i < count; ++i) {
    auto [name, mlp] = read_mlp(r);
    MlpSpec* slot = nullptr;
    const char* names[] = {"opacity", "color", "rotation", "scaling", "context"};
    MlpSpec* slots[] = {&m.opacity, &m.color, &m.rotation, &m.scaling, &m.context};
    for (int k = 0; k < 5; ++k) {
      if (name == names[k]) {
        slot = slots[k];
        seen[k] = true;
      }
    }
    if (slot == nullptr) fail(ErrorCode::kNoModel, "unknown net '" + name + "' in weights");
    *slot = std::move(mlp);
  }
  for (bool s : seen) {
    if (!s) fail(ErrorCode::kNoModel, "weights blob is missing a net");
  }
  HashGridConfig& c = m.hash.config;
  c.features_per_level = r.u8();
  c.log2_table_2d = r.u8();
  c.resolutions_2d = read_resolutions(r);
  c.log2_table_3d = r.u8();
  c.resolutions_3d = read_resolutions(r);
  if (c.log2_table_2d > 30 || c.log2_table_3d > 30) {
    fail(ErrorCode::kCorruptStream, "hash table size out of range");
  }
  for (std::size_t i = 0; i < 3 * c.resolutions_2d.size(); ++i) {
    m.hash.tables_2d.push_back(read_table(r, c.log2_table_2d, c.features_per_level));
  }
  for (std::size_t i = 0; i < c.resolutions_3d.size(); ++i) {
    m.hash.tables_3d.push_back(read_table(r, c.log2_table_3d, c.features_per_level));
  }
  r.expect_end();
  m.validate();
  return m;
}

std::vector<double> view_concat(std::span<const double> f, const Vec3& x, const Vec3& x_c) {
  const Vec3 d{x_c[0] - x[0], x_c[1] - x[1], x_c[2] - x[2]};
  const double dist = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
  if (!(dist > 0.0)) fail(ErrorCode::kDegenerateView, "camera coincides with the splat");
  std::vector<double> out(f.begin(), f.end());
  out.insert(out.end(), {d[0] / dist, d[1] / dist, d[2] / dist, dist});
  return out;
}

Mat3 quaternion_to_matrix(const std::array<double, 4>& q) {
  const auto [w, x, y, z] = q;
  return {{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
           {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
           {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}}};
}

Mat3 covariance_from(const std::array<double, 4>& unit_q, const Vec3& scale) {
  const Mat3 r = quaternion_to_matrix(unit_q);
  const Vec3 s2{scale[0] * scale[0], scale[1] * scale[1], scale[2] * scale[2]};
  Mat3 sigma{};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i; j < 3; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < 3; ++k) acc += r[i][k] * s2[k] * r[j][k];
      sigma[i][j] = acc;
      sigma[j][i] = acc;
    }
  }
  return sigma;
}

SplatAttributes decode_attributes(std::span<const double> f, const Vec3& s, const Vec3& x,
                                  const Vec3& x_c, const NeuralModel* model) {
  if (model == nullptr) fail(ErrorCode::kNoModel, "attribute decoding needs neural weights");
  if (f.size() != static_cast<std::size_t>(model->n_f)) {
    fail(ErrorCode::kShapeError, "feature width does not match the model");
  }
  const std::vector<double> view = view_concat(f, x, x_c);
  SplatAttributes a;
  a.opacity = mlp_forward(model->opacity, view)[0];
  const auto color = mlp_forward(model->color, view);
  a.color = {color[0], color[1], color[2]};

  const auto raw_q = mlp_forward(model->rotation, view);
  const double norm = std::sqrt(raw_q[0] * raw_q[0] + raw_q[1] * raw_q[1] +
                                raw_q[2] * raw_q[2] + raw_q[3] * raw_q[3]);
  if (norm < 1e-12) {
    a.rotation = {1.0, 0.0, 0.0, 0.0};
  } else {
    a.rotation = {raw_q[0] / norm, raw_q[1] / norm, raw_q[2] / norm, raw_q[3] / norm};
  }
  const auto gate = mlp_forward(model->scaling, view);
  for (std::size_t k = 0; k < 3; ++k) a.scale[k] = s[k] * detmath::sigmoid(gate[k]);
  a.covariance = covariance_from(a.rotation, a.scale);
  return a;
}

Vec3 normalize_to_unit(const Vec3& x, const BoundingBox& bbox) {
  Vec3 u;
  for (std::size_t k = 0; k < 3; ++k) {
    u[k] = std::clamp((x[k] - bbox.min[k]) / bbox.extent(k), 0.0, 1.0);
  }
  return u;
}

PredictedContext predict_context(const Vec3& unit_x, const NeuralModel& model,
                                 double sigma_floor, double delta_floor) {
  const std::vector<double> code = hash_encode(unit_x, model.hash);
  const std::vector<double> raw = mlp_forward(model.context, code);
  if (raw.size() != model.layout.output_dim) {
    fail(ErrorCode::kNoModel, "context net output does not match the layout record");
  }
  const ContextLayout& l = model.layout;
  auto channel = [&](std::size_t mu, std::size_t sigma, std::size_t delta) {
    return ChannelParams{raw[mu], std::max(detmath::softplus(raw[sigma]), sigma_floor),
                         std::max(detmath::softplus(raw[delta]), delta_floor)};
  };
  PredictedContext out;
  for (std::size_t c = 0; c < static_cast<std::size_t>(model.n_f); ++c) {
    out.features.channels.push_back(channel(l.mu_f + c, l.sigma_f + c, l.delta_f + c));
  }
  for (std::size_t c = 0; c < 3; ++c) {
    out.scaling.channels.push_back(channel(l.mu_s + c, l.sigma_s + c, l.delta_s + c));
  }
  return out;
}

}  // namespace smolgs
