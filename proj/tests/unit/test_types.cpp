#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "smolgs/error.hpp"
#include "smolgs/random.hpp"
#include "smolgs/types.hpp"
#include "unit/test_util.hpp"

namespace smolgs {
namespace {

Splat at(double x, double y, double z) { return Splat{{x, y, z}, std::vector<double>(1, 0.0), {}}; }

TEST(BoundingBox, SingleSplatUsesDegenerateAxisRule) {
  const BoundingBox b = tight_bounding_box(std::vector<Splat>{at(1, 2, 3)});
  const Vec3 c{1, 2, 3};
  for (int k = 0; k < 3; ++k) {
    const double eps = 0.5e-9 * std::max(1.0, std::abs(c[k]));
    EXPECT_DOUBLE_EQ(b.min[k], c[k] - eps);
    EXPECT_DOUBLE_EQ(b.max[k], c[k] + eps);
    EXPECT_GT(b.extent(k), 0.0);
    EXPECT_TRUE(b.contains(c));
  }
}

TEST(BoundingBox, TwoPointsInflateMaxOnly) {
  const BoundingBox b = tight_bounding_box(std::vector<Splat>{at(0, 0, 0), at(1, 1, 1)});
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(b.min[k], 0.0);
    EXPECT_EQ(b.max[k], 1.0 + 1e-9);
  }
}

TEST(BoundingBox, ContainsAllAndIsTightAgainstBruteForce) {
  const SplatCloud cloud = testing::random_cloud(1000, 2, 7, -3.0, 5.0);
  const BoundingBox b = cloud.bbox;
  Vec3 lo, hi;
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  for (const Splat& s : cloud.splats) {
    EXPECT_TRUE(b.contains(s.x));
    for (int k = 0; k < 3; ++k) {
      lo[k] = std::min(lo[k], s.x[k]);
      hi[k] = std::max(hi[k], s.x[k]);
    }
  }
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(b.min[k], lo[k]);
    const double eps = b.max[k] - hi[k];
    EXPECT_GT(eps, 0.0);
    EXPECT_LE(eps, 2e-9 * (hi[k] - lo[k]));
    // Shrinking the upper face by 2*eps excludes the maximal splat.
    EXPECT_LT(b.max[k] - 2 * eps, hi[k]);
  }
}

TEST(BoundingBox, PermutationInvariant) {
  SplatCloud cloud = testing::random_cloud(200, 1, 11);
  const BoundingBox a = tight_bounding_box(cloud);
  std::reverse(cloud.splats.begin(), cloud.splats.end());
  EXPECT_EQ(tight_bounding_box(cloud), a);
}

TEST(BoundingBox, EmptyCloudFails) {
  try {
    tight_bounding_box(std::vector<Splat>{});
    FAIL();
  } catch (const CodecError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyCloud);
  }
}

TEST(CodecConfig, DefaultsAndDepthLimits) {
  CodecConfig c;
  EXPECT_EQ(c.recursion_depth, 16);
  EXPECT_EQ(c.n_f, 8);
  EXPECT_EQ(c.sigma_floor, 1e-6);
  EXPECT_EQ(c.delta_floor, 1e-6);
  EXPECT_EQ(c.min_bin_probability, std::ldexp(1.0, -16));
  EXPECT_EQ(c.chunk_size, 65536u);
  EXPECT_NO_THROW(c.validate());
  for (int r : {0, 22}) {
    c.recursion_depth = r;
    EXPECT_THROW(c.validate(), CodecError);
  }
  c.recursion_depth = 21;
  EXPECT_NO_THROW(c.validate());
}

TEST(SplatCloud, ValidationRejectsBadSplats) {
  std::vector<Splat> ok{at(0, 0, 0), at(1, 1, 1)};
  EXPECT_NO_THROW(make_cloud(ok, 1));
  EXPECT_THROW(make_cloud(ok, 2), CodecError);  // feature width
  std::vector<Splat> nan{at(0, std::nan(""), 0)};
  EXPECT_THROW(make_cloud(nan, 1), CodecError);
  SplatCloud c = make_cloud(ok, 1);
  c.splats.push_back(at(2, 0, 0));
  EXPECT_THROW(validate_cloud(c), CodecError);  // outside bbox
}

}  // namespace
}  // namespace smolgs
