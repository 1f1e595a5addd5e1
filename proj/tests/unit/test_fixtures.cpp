#include <gtest/gtest.h>

#include <cmath>

#include "smolgs/error.hpp"
#include "smolgs/fixtures.hpp"
#include "smolgs/splat_io.hpp"

namespace smolgs {
namespace {

TEST(Fixtures, DeterministicPerSeed) {
  for (FixtureKind k : {FixtureKind::kSphere, FixtureKind::kCube, FixtureKind::kGaussianMixture}) {
    const Fixture a = make_fixture(k, 500, 4, 11);
    const Fixture b = make_fixture(k, 500, 4, 11);
    const Fixture c = make_fixture(k, 500, 4, 12);
    EXPECT_EQ(a.cloud.splats, b.cloud.splats);
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_NE(a.cloud.splats, c.cloud.splats);
    EXPECT_EQ(a.cloud.n_f, 4);
    EXPECT_TRUE(a.cloud.bbox.contains(a.cloud.bbox));
  }
}

TEST(Fixtures, SphereIsOnTheUnitSphere) {
  const Fixture f = make_fixture(FixtureKind::kSphere, 10000, 2, 1);
  Vec3 mean{};
  for (const Splat& s : f.cloud.splats) {
    const double r = std::sqrt(s.x[0] * s.x[0] + s.x[1] * s.x[1] + s.x[2] * s.x[2]);
    EXPECT_NEAR(r, 1.0, 1e-12);
    for (int k = 0; k < 3; ++k) mean[k] += s.x[k] / 10000.0;
  }
  // Uniform on the sphere: each coordinate has variance 1/3.
  for (double m : mean) EXPECT_LT(std::abs(m), 5.0 * std::sqrt(1.0 / 3.0 / 10000.0));
}

TEST(Fixtures, CubeIsInsideTheCube) {
  const Fixture f = make_fixture(FixtureKind::kCube, 5000, 1, 2);
  for (const Splat& s : f.cloud.splats) {
    for (double v : s.x) {
      EXPECT_GE(v, -1.0);
      EXPECT_LT(v, 1.0);
    }
  }
}

TEST(Fixtures, MixtureComponentMeans) {
  const std::size_t n = 30000;
  const Fixture f = make_fixture(FixtureKind::kGaussianMixture, n, 3, 3);
  ASSERT_EQ(f.labels.size(), n);
  std::array<std::size_t, 3> count{};
  std::array<Vec3, 3> sum{};
  for (std::size_t i = 0; i < n; ++i) {
    const int c = f.labels[i];
    ASSERT_GE(c, 0);
    ASSERT_LT(c, 3);
    ++count[c];
    for (int k = 0; k < 3; ++k) sum[c][k] += f.cloud.splats[i].x[k];
  }
  for (int c = 0; c < 3; ++c) {
    // Components are picked uniformly.
    EXPECT_NEAR(static_cast<double>(count[c]) / n, 1.0 / 3.0, 5.0 * std::sqrt(2.0 / 9.0 / n));
    const double tol = 5.0 * kMixtureComponents[c].stddev / std::sqrt(static_cast<double>(count[c]));
    for (int k = 0; k < 3; ++k) {
      EXPECT_NEAR(sum[c][k] / count[c], kMixtureComponents[c].mean[k], tol) << c << " " << k;
    }
  }
}

TEST(Fixtures, FeatureAndScalingRecipe) {
  const Fixture f = make_fixture(FixtureKind::kCube, 4000, 6, 4);
  double resid2 = 0.0;
  for (const Splat& s : f.cloud.splats) {
    for (int k = 0; k < 6; ++k) resid2 += std::pow(s.f[k] - s.x[k % 3] * (k + 1) / 6.0, 2);
    for (double v : s.s) {
      EXPECT_GE(v, 0.005);
      EXPECT_LT(v, 0.015);
    }
  }
  EXPECT_NEAR(std::sqrt(resid2 / (4000.0 * 6)), 0.05, 0.002);
}

TEST(Fixtures, Names) {
  for (FixtureKind k : {FixtureKind::kSphere, FixtureKind::kCube, FixtureKind::kGaussianMixture}) {
    EXPECT_EQ(parse_fixture_kind(fixture_name(k)), k);
  }
  EXPECT_THROW(parse_fixture_kind("torus"), CodecError);
  EXPECT_THROW(make_fixture(FixtureKind::kCube, 0, 2, 1), CodecError);
  EXPECT_THROW(make_fixture(FixtureKind::kCube, 5, 0, 1), CodecError);
  EXPECT_THROW(make_fixture(FixtureKind::kCube, 5, 256, 1), CodecError);
}

}  // namespace
}  // namespace smolgs
