#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "smolgs/container.hpp"
#include "smolgs/fixtures.hpp"
#include "smolgs/splat_io.hpp"

namespace smolgs {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("smolgs_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string p(const std::string& name) const { return (dir_ / name).string(); }

  int run(const std::string& args) {
    const std::string cmd = std::string(SMOLGS_CLI) + " " + args + " >" + p("stdout.txt") + " 2>" + p("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string out() const { return slurp(p("stdout.txt")); }
  std::string err() const { return slurp(p("stderr.txt")); }
  static std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  void write_text(const std::string& name, const std::string& text) { std::ofstream(p(name)) << text; }

  fs::path dir_;
};

TEST_F(Cli, CubeCornersAtDepthOne) {
  write_text("corners.xyz", "0 0 0\n1 0 0\n0 1 0\n1 1 0\n0 0 1\n1 0 1\n0 1 1\n1 1 1\n");
  ASSERT_EQ(run("encode --input " + p("corners.xyz") + " --output " + p("c.smgs") + " --recursion 1 --nf 2"), 0) << err();
  EXPECT_NE(out().find("splats 8"), std::string::npos) << out();
  ASSERT_EQ(run("stats --json --input " + p("c.smgs")), 0) << err();
  const auto j = nlohmann::json::parse(out());
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["splat_count"], 8);
  EXPECT_EQ(j["octree"]["occupancy_bytes"], 1);
  EXPECT_EQ(j["octree"]["top_bytes"][0]["value"], 0xFF);
  EXPECT_EQ(j["sizes"]["total"], fs::file_size(p("c.smgs")));
  const auto& s = j["sizes"];
  EXPECT_EQ(s["x"].get<int>() + s["f"].get<int>() + s["s"].get<int>() + s["mlps"].get<int>() +
                s["other"].get<int>(),
            s["total"].get<int>());
}

TEST_F(Cli, EncodeDecodeRoundTrip) {
  ASSERT_EQ(run("fixture --kind gaussian-mixture --count 700 --nf 3 --seed 5 --output " + p("in.splt")), 0) << err();
  ASSERT_EQ(run("encode --input " + p("in.splt") + " --output " + p("c.smgs") + " --recursion 10 --zip"), 0) << err();
  EXPECT_TRUE(fs::exists(p("c.smgs.zip")));
  ASSERT_EQ(run("decode --input " + p("c.smgs") + " --output " + p("out.splt")), 0) << err();
  const DecodedContainer d = decode_container(read_file(p("c.smgs")));
  EXPECT_EQ(read_file(p("out.splt")), write_native(d.cloud));
  ASSERT_EQ(run("decode --format ascii --input " + p("c.smgs") + " --output " + p("out.xyz")), 0);
  const std::string text = slurp(p("out.xyz"));
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), d.cloud.size());
  ASSERT_EQ(run("stats --input " + p("c.smgs")), 0);
  EXPECT_NE(out().find("sum of sections"), std::string::npos);
}

TEST_F(Cli, FixtureIsDeterministic) {
  ASSERT_EQ(run("fixture --kind sphere --count 100 --nf 2 --seed 3 --output " + p("a.splt")), 0);
  ASSERT_EQ(run("fixture --kind sphere --count 100 --nf 2 --seed 3 --output " + p("b.splt")), 0);
  EXPECT_EQ(read_file(p("a.splt")), read_file(p("b.splt")));
  EXPECT_EQ(read_file(p("a.splt")), write_native(make_fixture(FixtureKind::kSphere, 100, 2, 3).cloud));
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("fixture --kind torus --count 10 --output " + p("t.splt")), 3);
  EXPECT_EQ(run("bogus-subcommand"), 3);
  EXPECT_EQ(run("encode --input " + p("missing.splt") + " --output " + p("x.smgs")), 2);
  write_text("junk.smgs", "NOPE and some more bytes to pass the length checks................");
  EXPECT_EQ(run("decode --input " + p("junk.smgs") + " --output " + p("x.splt")), 1);
  EXPECT_NE(err().find("magic"), std::string::npos) << err();

  // A PLY without opacity.
  std::string ply = "ply\nformat binary_little_endian 1.0\nelement vertex 1\n";
  for (const char* n : {"x", "y", "z", "f_dc_0", "f_dc_1", "f_dc_2", "scale_0", "scale_1", "scale_2",
                        "rot_0", "rot_1", "rot_2", "rot_3"}) {
    ply += std::string("property float ") + n + "\n";
  }
  ply += "end_header\n" + std::string(13 * 4, '\0');
  write_text("bad.ply", ply);
  EXPECT_EQ(run("encode --input " + p("bad.ply") + " --output " + p("x.smgs")), 1);
  EXPECT_NE(err().find("opacity"), std::string::npos) << err();

  ASSERT_EQ(run("fixture --kind cube --count 50 --nf 2 --output " + p("c.splt")), 0);
  EXPECT_EQ(run("encode --input " + p("c.splt") + " --output " + p("x.smgs") + " --nf 3"), 3);
  EXPECT_EQ(run("encode --input " + p("c.splt") + " --output " + p("x.smgs") + " --context neural"), 3);
  ASSERT_EQ(run("encode --input " + p("c.splt") + " --output " + p("s.smgs")), 0);
  EXPECT_EQ(run("materialize --input " + p("s.smgs") + " --camera 0,0,5 --output " + p("m.ply")), 3);
  EXPECT_EQ(run("materialize --input " + p("s.smgs") + " --camera 0,0 --output " + p("m.ply")), 3);
}

TEST_F(Cli, MaterializeMatchesLibrary) {
  ASSERT_EQ(run("fixture --kind sphere --count 120 --nf 4 --seed 8 --output " + p("in.splt")), 0);
  ASSERT_EQ(run("init-weights --nf 4 --seed 2 --log2-table-2d 8 --log2-table-3d 8 --output " + p("w.bin")), 0);
  ASSERT_EQ(run("encode --context neural --weights " + p("w.bin") + " --recursion 9 --input " + p("in.splt") +
                " --output " + p("n.smgs")),
            0)
      << err();
  ASSERT_EQ(run("materialize --input " + p("n.smgs") + " --camera 0.5,-1,2 --output " + p("m.ply")), 0) << err();
  const DecodedContainer d = decode_container(read_file(p("n.smgs")));
  ASSERT_TRUE(d.model.has_value());
  std::vector<Vec3> pos;
  std::vector<SplatAttributes> attrs;
  for (const Splat& s : d.cloud.splats) {
    pos.push_back(s.x);
    attrs.push_back(decode_attributes(s.f, s.s, s.x, {0.5, -1, 2}, &*d.model));
  }
  EXPECT_EQ(read_file(p("m.ply")), write_attribute_ply(pos, attrs));
}

TEST_F(Cli, ZeroWeightsGiveGreyColours) {
  ASSERT_EQ(run("fixture --kind cube --count 60 --nf 2 --output " + p("in.splt")), 0);
  ASSERT_EQ(run("init-weights --zero --nf 2 --log2-table-2d 6 --log2-table-3d 6 --output " + p("w.bin")), 0);
  ASSERT_EQ(run("encode --context neural --weights " + p("w.bin") + " --recursion 8 --input " + p("in.splt") +
                " --output " + p("n.smgs")),
            0)
      << err();
  ASSERT_EQ(run("materialize --input " + p("n.smgs") + " --camera 1,1,1 --output " + p("m.ply")), 0) << err();
  const Bytes ply = read_file(p("m.ply"));
  const std::string text(ply.begin(), ply.end());
  const std::size_t body = text.find("end_header\n") + 11;
  const std::size_t n = (ply.size() - body) / (14 * 4);
  ASSERT_EQ(n, 60u);
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 3; c < 6; ++c) {
      float v;
      std::memcpy(&v, ply.data() + body + i * 56 + c * 4, 4);
      EXPECT_EQ(v, 0.5f);
    }
  }
}

}  // namespace
}  // namespace smolgs
