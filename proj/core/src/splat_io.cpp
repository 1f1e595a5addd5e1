#include "smolgs/splat_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "smolgs/detmath.hpp"
#include "smolgs/error.hpp"

namespace smolgs {

namespace {

bool starts_with(std::span<const std::uint8_t> bytes, std::string_view prefix) {
  return bytes.size() >= prefix.size() &&
         std::equal(prefix.begin(), prefix.end(), bytes.begin(),
                    [](char a, std::uint8_t b) { return static_cast<std::uint8_t>(a) == b; });
}

struct PlyProperty {
  std::string name;
  std::string type;
  std::size_t offset = 0;
};

std::size_t ply_type_size(const std::string& type) {
  static const std::map<std::string, std::size_t> sizes = {
      {"char", 1},   {"uchar", 1},   {"int8", 1},    {"uint8", 1},   {"short", 2},
      {"ushort", 2}, {"int16", 2},   {"uint16", 2},  {"int", 4},     {"uint", 4},
      {"int32", 4},  {"uint32", 4},  {"float", 4},   {"float32", 4}, {"double", 8},
      {"float64", 8}};
  auto it = sizes.find(type);
  if (it == sizes.end()) fail(ErrorCode::kParseError, "PLY: unsupported property type " + type);
  return it->second;
}

double read_ply_value(const std::uint8_t* p, const std::string& type) {
  auto le = [p](int n) {
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
  };
  if (type == "float" || type == "float32") {
    const auto bits = static_cast<std::uint32_t>(le(4));
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
  }
  if (type == "double" || type == "float64") {
    const std::uint64_t bits = le(8);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
  }
  if (type == "uchar" || type == "uint8") return static_cast<double>(le(1));
  if (type == "char" || type == "int8") return static_cast<std::int8_t>(le(1));
  if (type == "ushort" || type == "uint16") return static_cast<double>(le(2));
  if (type == "short" || type == "int16") return static_cast<std::int16_t>(le(2));
  if (type == "uint" || type == "uint32") return static_cast<double>(le(4));
  return static_cast<std::int32_t>(le(4));
}

void put_f32(Bytes& out, double v) {
  const float f = static_cast<float>(v);
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

}  // namespace

SplatFormat detect_format(std::span<const std::uint8_t> bytes) {
  if (starts_with(bytes, "SPLT")) return SplatFormat::kNative;
  if (starts_with(bytes, "ply\n") || starts_with(bytes, "ply\r\n")) return SplatFormat::kPly;
  return SplatFormat::kAscii;
}

Bytes write_native(const SplatCloud& cloud) {
  if (cloud.n_f < 1 || cloud.n_f > 255) fail(ErrorCode::kInvalidConfig, "n_f must be in [1, 255]");
  ByteWriter w;
  w.str("SPLT");
  w.u8(static_cast<std::uint8_t>(cloud.n_f));
  w.u8(0);
  w.u8(0);
  w.u8(0);
  w.u64(cloud.size());
  for (const Splat& s : cloud.splats) {
    if (s.f.size() != static_cast<std::size_t>(cloud.n_f)) {
      fail(ErrorCode::kShapeError, "feature width does not match n_f");
    }
    for (double v : s.x) w.f32(static_cast<float>(v));
    for (double v : s.f) w.f32(static_cast<float>(v));
    for (double v : s.s) w.f32(static_cast<float>(v));
  }
  return w.take();
}

SplatCloud read_native(std::span<const std::uint8_t> bytes) {
  if (!starts_with(bytes, "SPLT")) fail(ErrorCode::kParseError, "missing SPLT magic");
  if (bytes.size() < kNativeHeaderSize) fail(ErrorCode::kParseError, "SPLT header truncated");
  ByteReader r(bytes, "SPLT");
  r.bytes(4);
  const int n_f = r.u8();
  r.bytes(3);
  const std::uint64_t count = r.u64();
  if (n_f < 1) fail(ErrorCode::kParseError, "SPLT: n_f must be at least 1");
  const std::uint64_t record = 4ull * (6 + static_cast<std::uint64_t>(n_f));
  if (count > r.remaining() / record || count * record != r.remaining()) {
    fail(ErrorCode::kParseError, "SPLT: record count " + std::to_string(count) +
                                     " does not match the file size");
  }
  std::vector<Splat> splats(count);
  for (Splat& s : splats) {
    for (double& v : s.x) v = r.f32();
    s.f.resize(static_cast<std::size_t>(n_f));
    for (double& v : s.f) v = r.f32();
    for (double& v : s.s) v = r.f32();
  }
  if (splats.empty()) fail(ErrorCode::kEmptyCloud, "SPLT file holds no splats");
  return make_cloud(std::move(splats), n_f);
}

SplatCloud read_ply(std::span<const std::uint8_t> bytes, int n_f) {
  if (n_f < 1) fail(ErrorCode::kInvalidConfig, "n_f must be at least 1");
  const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  const std::size_t end = text.find("end_header");
  if (!starts_with(bytes, "ply") || end == std::string_view::npos) {
    fail(ErrorCode::kParseError, "PLY: missing header");
  }
  std::size_t body = text.find('\n', end);
  if (body == std::string_view::npos) fail(ErrorCode::kParseError, "PLY: truncated header");
  ++body;

  std::istringstream header{std::string(text.substr(0, end))};
  std::string line;
  std::uint64_t count = 0;
  bool in_vertex = false;
  bool seen_vertex = false;
  bool format_ok = false;
  std::vector<PlyProperty> props;
  std::size_t stride = 0;
  while (std::getline(header, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "format") {
      std::string fmt, version;
      ls >> fmt >> version;
      if (fmt != "binary_little_endian") {
        fail(ErrorCode::kParseError, "PLY: only binary_little_endian is supported, got " + fmt);
      }
      format_ok = true;
    } else if (key == "element") {
      std::string name;
      if (seen_vertex) break;  // later elements are ignored
      ls >> name >> count;
      if (name != "vertex") fail(ErrorCode::kParseError, "PLY: first element must be vertex");
      if (!ls) fail(ErrorCode::kParseError, "PLY: bad vertex count");
      in_vertex = seen_vertex = true;
    } else if (key == "property" && in_vertex) {
      std::string type, name;
      ls >> type;
      if (type == "list") fail(ErrorCode::kParseError, "PLY: list properties are not supported");
      ls >> name;
      props.push_back({name, type, stride});
      stride += ply_type_size(type);
    }
  }
  if (!format_ok) fail(ErrorCode::kParseError, "PLY: missing format line");
  if (!seen_vertex) fail(ErrorCode::kParseError, "PLY: no vertex element");

  auto find = [&](const std::string& name) -> const PlyProperty& {
    for (const PlyProperty& p : props) {
      if (p.name == name) return p;
    }
    fail(ErrorCode::kParseError, "PLY: missing property " + name);
  };
  const std::vector<std::string> feature_names = {"f_dc_0", "f_dc_1", "f_dc_2", "opacity",
                                                  "rot_0",  "rot_1",  "rot_2",  "rot_3"};
  std::vector<const PlyProperty*> xyz, feat, scale;
  for (const char* n : {"x", "y", "z"}) xyz.push_back(&find(n));
  for (const auto& n : feature_names) feat.push_back(&find(n));
  for (const char* n : {"scale_0", "scale_1", "scale_2"}) scale.push_back(&find(n));

  const std::span<const std::uint8_t> data = bytes.subspan(body);
  if (stride == 0 || count > data.size() / stride) {
    fail(ErrorCode::kParseError, "PLY: " + std::to_string(count) +
                                     " vertices declared but the body is too short");
  }
  if (count == 0) fail(ErrorCode::kEmptyCloud, "PLY holds no vertices");
  std::vector<Splat> splats(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint8_t* rec = data.data() + i * stride;
    Splat& s = splats[i];
    for (int k = 0; k < 3; ++k) s.x[k] = read_ply_value(rec + xyz[k]->offset, xyz[k]->type);
    s.f.assign(static_cast<std::size_t>(n_f), 0.0);
    for (std::size_t k = 0; k < std::min(feat.size(), s.f.size()); ++k) {
      s.f[k] = read_ply_value(rec + feat[k]->offset, feat[k]->type);
    }
    for (int k = 0; k < 3; ++k) {
      s.s[k] = detmath::exp(read_ply_value(rec + scale[k]->offset, scale[k]->type));
    }
  }
  return make_cloud(std::move(splats), n_f);
}

SplatCloud read_ascii(std::span<const std::uint8_t> bytes, int n_f) {
  if (n_f < 1) fail(ErrorCode::kInvalidConfig, "n_f must be at least 1");
  std::istringstream in{std::string(bytes.begin(), bytes.end())};
  std::string line;
  std::vector<Splat> splats;
  std::size_t line_no = 0;
  const std::size_t full = 6 + static_cast<std::size_t>(n_f);
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::vector<double> values;
    std::string tok;
    while (ls >> tok) {
      double v = 0.0;
      const char* first = tok.data();
      const char* last = first + tok.size();
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last) {
        fail(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": bad number '" + tok + "'");
      }
      values.push_back(v);
    }
    if (values.size() != 3 && values.size() != full) {
      fail(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": expected 3 or " +
                                       std::to_string(full) + " columns, got " +
                                       std::to_string(values.size()));
    }
    Splat s;
    std::copy_n(values.begin(), 3, s.x.begin());
    s.f.assign(static_cast<std::size_t>(n_f), 0.0);
    if (values.size() == full) {
      std::copy_n(values.begin() + 3, n_f, s.f.begin());
      std::copy_n(values.begin() + 3 + n_f, 3, s.s.begin());
    }
    splats.push_back(std::move(s));
  }
  if (splats.empty()) fail(ErrorCode::kEmptyCloud, "no points in ASCII input");
  return make_cloud(std::move(splats), n_f);
}

std::string write_ascii(const SplatCloud& cloud) {
  std::string out;
  char buf[32];
  for (const Splat& s : cloud.splats) {
    bool first = true;
    auto put = [&](double v) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      if (!first) out += ' ';
      out += buf;
      first = false;
    };
    for (double v : s.x) put(v);
    for (double v : s.f) put(v);
    for (double v : s.s) put(v);
    out += '\n';
  }
  return out;
}

SplatCloud read_splats(std::span<const std::uint8_t> bytes, int n_f) {
  switch (detect_format(bytes)) {
    case SplatFormat::kNative: return read_native(bytes);
    case SplatFormat::kPly: return read_ply(bytes, n_f);
    case SplatFormat::kAscii: return read_ascii(bytes, n_f);
  }
  fail(ErrorCode::kParseError, "unknown input format");
}

Bytes write_attribute_ply(const std::vector<Vec3>& positions,
                          const std::vector<SplatAttributes>& attributes) {
  if (positions.size() != attributes.size()) {
    fail(ErrorCode::kShapeError, "positions and attributes differ in length");
  }
  std::string header = "ply\nformat binary_little_endian 1.0\nelement vertex " +
                       std::to_string(positions.size()) + "\n";
  for (const char* name : {"x", "y", "z", "red", "green", "blue", "opacity", "scale_0", "scale_1",
                           "scale_2", "rot_0", "rot_1", "rot_2", "rot_3"}) {
    header += std::string("property float ") + name + "\n";
  }
  header += "end_header\n";
  Bytes out(header.begin(), header.end());
  out.reserve(out.size() + positions.size() * 14 * 4);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const SplatAttributes& a = attributes[i];
    for (double v : positions[i]) put_f32(out, v);
    for (double v : a.color) put_f32(out, v);
    put_f32(out, std::max(0.0, a.opacity));
    for (double v : a.scale) put_f32(out, v);
    for (double v : a.rotation) put_f32(out, v);
  }
  return out;
}

Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path);
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorCode::kIoError, "cannot read " + path);
  return data;
}

void write_file(const std::string& path, std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIoError, "cannot create " + path);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path);
}

}  // namespace smolgs
