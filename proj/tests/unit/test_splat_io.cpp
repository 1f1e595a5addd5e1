#include <gtest/gtest.h>

#include <cstring>

#include "smolgs/detmath.hpp"
#include "smolgs/error.hpp"
#include "smolgs/splat_io.hpp"
#include "unit/test_util.hpp"

namespace smolgs {
namespace {

Bytes as_bytes(const std::string& s) { return Bytes(s.begin(), s.end()); }

ErrorCode error_of(const std::function<void()>& fn, std::string* message = nullptr) {
  try {
    fn();
  } catch (const CodecError& e) {
    if (message) *message = e.what();
    return e.code();
  }
  return ErrorCode::kIoError;
}

struct PlyBuilder {
  std::vector<std::pair<std::string, std::string>> props;  // type, name
  std::vector<std::vector<double>> rows;

  Bytes build() const {
    std::string h = "ply\nformat binary_little_endian 1.0\ncomment test\nelement vertex " +
                    std::to_string(rows.size()) + "\n";
    for (const auto& [type, name] : props) h += "property " + type + " " + name + "\n";
    h += "element face 0\nproperty list uchar int vertex_indices\nend_header\n";
    Bytes out = as_bytes(h);
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < props.size(); ++i) {
        if (props[i].first == "double") {
          std::uint8_t b[8];
          std::memcpy(b, &row[i], 8);
          out.insert(out.end(), b, b + 8);
        } else if (props[i].first == "uchar") {
          out.push_back(static_cast<std::uint8_t>(row[i]));
        } else {
          const float f = static_cast<float>(row[i]);
          std::uint8_t b[4];
          std::memcpy(b, &f, 4);
          out.insert(out.end(), b, b + 4);
        }
      }
    }
    return out;
  }
};

PlyBuilder gaussian_ply() {
  PlyBuilder p;
  p.props = {{"float", "x"},      {"float", "y"},       {"float", "z"},       {"double", "nx"},
             {"uchar", "flag"},   {"float", "f_dc_0"},  {"float", "f_dc_1"},  {"float", "f_dc_2"},
             {"float", "opacity"}, {"float", "scale_0"}, {"float", "scale_1"}, {"float", "scale_2"},
             {"float", "rot_0"},  {"float", "rot_1"},   {"float", "rot_2"},   {"float", "rot_3"}};
  p.rows = {{1, 2, 3, 9, 7, 0.5, 0.25, -0.5, 2, -4, -3, -2, 1, 0, 0, 0},
            {-1, 0, 1, 9, 7, 1, 2, 3, 4, -1, -1, -1, 0.5, 0.5, 0.5, 0.5}};
  return p;
}

TEST(Native, RoundTripIsExactInFloat32) {
  const SplatCloud c = testing::random_cloud(50, 5, 1);
  const Bytes b = write_native(c);
  EXPECT_EQ(b.size(), kNativeHeaderSize + 50u * (3 + 5 + 3) * 4);
  EXPECT_EQ(detect_format(b), SplatFormat::kNative);
  const SplatCloud r = read_native(b);
  ASSERT_EQ(r.size(), 50u);
  EXPECT_EQ(r.n_f, 5);
  for (std::size_t i = 0; i < r.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      EXPECT_EQ(r.splats[i].x[k], static_cast<float>(c.splats[i].x[k]));
      EXPECT_EQ(r.splats[i].s[k], static_cast<float>(c.splats[i].s[k]));
    }
    for (int k = 0; k < 5; ++k) EXPECT_EQ(r.splats[i].f[k], static_cast<float>(c.splats[i].f[k]));
  }
  EXPECT_EQ(write_native(r), b);
}

TEST(Native, RejectsMalformed) {
  const Bytes b = write_native(testing::random_cloud(3, 2, 2));
  EXPECT_EQ(error_of([&] { read_native(Bytes(b.begin(), b.end() - 1)); }), ErrorCode::kParseError);
  EXPECT_EQ(error_of([&] { read_native(Bytes(b.begin(), b.begin() + 10)); }), ErrorCode::kParseError);
  Bytes zero_nf = b;
  zero_nf[4] = 0;
  EXPECT_EQ(error_of([&] { read_native(zero_nf); }), ErrorCode::kParseError);
}

TEST(Ply, MapsGaussianAttributes) {
  const Bytes b = gaussian_ply().build();
  EXPECT_EQ(detect_format(b), SplatFormat::kPly);
  const SplatCloud c = read_ply(b, 8);
  ASSERT_EQ(c.size(), 2u);
  const Splat& s = c.splats[0];
  EXPECT_EQ(s.x, (Vec3{1, 2, 3}));
  EXPECT_EQ(s.f, (std::vector<double>{0.5, 0.25, -0.5, 2, 1, 0, 0, 0}));
  EXPECT_EQ(s.s[0], detmath::exp(-4.0));
  EXPECT_EQ(s.s[2], detmath::exp(-2.0));
  // Narrower and wider feature widths truncate or zero-pad.
  EXPECT_EQ(read_ply(b, 2).splats[1].f, (std::vector<double>{1, 2}));
  EXPECT_EQ(read_ply(b, 10).splats[1].f, (std::vector<double>{1, 2, 3, 4, 0.5, 0.5, 0.5, 0.5, 0, 0}));
}

TEST(Ply, MissingPropertyIsNamed) {
  PlyBuilder p = gaussian_ply();
  p.props.erase(p.props.begin() + 8);  // opacity
  for (auto& row : p.rows) row.erase(row.begin() + 8);
  std::string msg;
  EXPECT_EQ(error_of([&] { read_ply(p.build(), 8); }, &msg), ErrorCode::kParseError);
  EXPECT_NE(msg.find("opacity"), std::string::npos) << msg;
}

TEST(Ply, RejectsUnsupportedVariants) {
  Bytes ascii = as_bytes("ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nend_header\n1\n");
  EXPECT_EQ(error_of([&] { read_ply(ascii, 8); }), ErrorCode::kParseError);
  Bytes b = gaussian_ply().build();
  EXPECT_EQ(error_of([&] { read_ply(Bytes(b.begin(), b.end() - 3), 8); }), ErrorCode::kParseError);
}

TEST(Ascii, ParsesCommentsAndWhitespace) {
  const Bytes b = as_bytes("# header\n1 2 3\n\n  -0.5\t0.25  1e-3  # trailing\n");
  EXPECT_EQ(detect_format(b), SplatFormat::kAscii);
  const SplatCloud c = read_ascii(b, 3);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.splats[1].x, (Vec3{-0.5, 0.25, 1e-3}));
  EXPECT_EQ(c.splats[1].f, (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(c.splats[1].s, (Vec3{0, 0, 0}));
}

TEST(Ascii, RoundTripsThroughText) {
  const SplatCloud c = testing::random_cloud(100, 1, 4);
  const std::string text = write_ascii(c);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 100);
  const SplatCloud r = read_ascii(as_bytes(text), 1);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(r.splats[i], c.splats[i]);
}

TEST(Ascii, RejectsBadLines) {
  std::string msg;
  EXPECT_EQ(error_of([&] { read_ascii(as_bytes("1 2\n"), 1); }), ErrorCode::kParseError);
  EXPECT_EQ(error_of([&] { read_ascii(as_bytes("1 2 3 4 5 6 7 8\n"), 1); }), ErrorCode::kParseError);
  EXPECT_EQ(error_of([&] { read_ascii(as_bytes("1 2 3\n1 2 3 4\n"), 1), void(); }, &msg),
            ErrorCode::kParseError);
  EXPECT_NE(msg.find("line 2"), std::string::npos);
  EXPECT_EQ(error_of([&] { read_ascii(as_bytes("1 2 x\n"), 1); }), ErrorCode::kParseError);
  EXPECT_EQ(error_of([&] { read_ascii(as_bytes("# only\n"), 1); }), ErrorCode::kEmptyCloud);
}

TEST(AttributePly, HeaderAndRecordSize) {
  SplatAttributes a;
  a.opacity = -0.25;
  const Bytes b = write_attribute_ply({{1, 2, 3}, {4, 5, 6}}, {a, a});
  const std::string text(b.begin(), b.end());
  const std::size_t end = text.find("end_header\n");
  ASSERT_NE(end, std::string::npos);
  EXPECT_NE(text.find("element vertex 2\n"), std::string::npos);
  EXPECT_EQ(b.size() - (end + 11), 2u * 14 * 4);
  // The reader sees the positions again.
  float x;
  std::memcpy(&x, b.data() + end + 11 + 14 * 4, 4);
  EXPECT_EQ(x, 4.0f);
  float opacity;
  std::memcpy(&opacity, b.data() + end + 11 + 6 * 4, 4);
  EXPECT_EQ(opacity, 0.0f);
  EXPECT_THROW(write_attribute_ply({{1, 2, 3}}, {}), CodecError);
}

TEST(Files, MissingFileIsIoError) {
  EXPECT_EQ(error_of([] { read_file("/nonexistent/dir/file.bin"); }), ErrorCode::kIoError);
  EXPECT_EQ(error_of([] { write_file("/nonexistent/dir/file.bin", Bytes{1}); }), ErrorCode::kIoError);
}

}  // namespace
}  // namespace smolgs
