#include <gtest/gtest.h>

#include "golden/golden_recipe.hpp"
#include "smolgs/splat_io.hpp"

namespace smolgs {
namespace {

class Golden : public ::testing::TestWithParam<golden::Recipe> {
 protected:
  Bytes load(const char* suffix) const { return read_file(golden::path(SMOLGS_GOLDEN_DIR, GetParam(), suffix)); }
};

TEST_P(Golden, FixtureMatchesStoredInput) {
  EXPECT_EQ(write_native(golden::input_for(GetParam())), load(".input.splt"));
}

TEST_P(Golden, EncodeIsByteIdentical) {
  const SplatCloud input = read_native(load(".input.splt"));
  const Bytes expected = load(".smgs");
  EXPECT_EQ(golden::encode_recipe(GetParam(), input), expected);
  EXPECT_EQ(golden::encode_recipe(GetParam(), input, 3), expected);
}

TEST_P(Golden, DecodeIsByteIdentical) {
  const DecodedContainer d = decode_container(load(".smgs"));
  EXPECT_EQ(write_native(d.cloud), load(".decoded.splt"));
  EXPECT_EQ(d.header.mode(), GetParam().mode);
}

INSTANTIATE_TEST_SUITE_P(Files, Golden, ::testing::ValuesIn(golden::kRecipes),
                         [](const auto& info) { return std::string(info.param.name); });

}  // namespace
}  // namespace smolgs
