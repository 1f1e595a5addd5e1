#include <gtest/gtest.h>

#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>

#include "smolgs/detmath.hpp"
#include "smolgs/random.hpp"

namespace smolgs {
namespace {

using Big = boost::multiprecision::cpp_bin_float_50;

double rel_err(double got, const Big& want) {
  if (want == 0) return std::abs(got);
  return static_cast<double>(abs((Big(got) - want) / want));
}

TEST(Detmath, ExpAgainstHighPrecision) {
  SplitMix64 rng(1);
  double worst = 0;
  for (int i = 0; i < 4000; ++i) {
    const double x = rng.uniform(-700.0, 700.0);
    worst = std::max(worst, rel_err(detmath::exp(x), exp(Big(x))));
  }
  EXPECT_LT(worst, 4e-16);
  EXPECT_EQ(detmath::exp(0.0), 1.0);
  EXPECT_EQ(detmath::exp(-1000.0), 0.0);
  EXPECT_TRUE(std::isinf(detmath::exp(1000.0)));
}

TEST(Detmath, LogAgainstHighPrecision) {
  SplitMix64 rng(2);
  double worst = 0;
  for (int i = 0; i < 4000; ++i) {
    const double x = std::ldexp(0.5 + rng.uniform(), static_cast<int>(rng.below(400)) - 200);
    worst = std::max(worst, rel_err(detmath::log(x), log(Big(x))));
  }
  EXPECT_LT(worst, 4e-16);
  EXPECT_EQ(detmath::log(1.0), 0.0);
  EXPECT_TRUE(std::isinf(detmath::log(0.0)));
  EXPECT_TRUE(std::isnan(detmath::log(-1.0)));
}

TEST(Detmath, Log1pSoftplusSigmoid) {
  SplitMix64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    const double t = std::ldexp(rng.uniform(), -static_cast<int>(rng.below(40)));
    EXPECT_LT(rel_err(detmath::log1p(t), log(1 + Big(t))), 1e-15) << t;
    const double z = rng.uniform(-50.0, 50.0);
    EXPECT_LT(rel_err(detmath::softplus(z), log(1 + exp(Big(z)))), 1e-14) << z;
    EXPECT_LT(rel_err(detmath::sigmoid(z), 1 / (1 + exp(-Big(z)))), 1e-14) << z;
  }
  EXPECT_DOUBLE_EQ(detmath::softplus(0.0), std::log(2.0));
  EXPECT_EQ(detmath::sigmoid(0.0), 0.5);
  EXPECT_EQ(detmath::softplus(1000.0), 1000.0);
}

TEST(Detmath, ErfcAgainstHighPrecision) {
  SplitMix64 rng(4);
  double worst = 0;
  for (int i = 0; i < 3000; ++i) {
    // erfc leaves the normal double range just above 26.5.
    const double x = rng.uniform(-6.0, 26.5);
    worst = std::max(worst, rel_err(detmath::erfc(x), boost::math::erfc(Big(x))));
  }
  EXPECT_LT(worst, 1e-13);
  EXPECT_EQ(detmath::erfc(0.0), 1.0);
  EXPECT_EQ(detmath::erfc(40.0), 0.0);
  EXPECT_EQ(detmath::erfc(-40.0), 2.0);
}

TEST(Detmath, NormalIntervalTails) {
  // Far tail masses keep full relative precision.
  const double p = detmath::normal_interval(10.0, 10.5, 0.0, 1.0);
  const Big want = (boost::math::erfc(Big(10) / sqrt(Big(2))) -
                    boost::math::erfc(Big(10.5) / sqrt(Big(2)))) / 2;
  EXPECT_LT(rel_err(p, want), 1e-12);
  const double q = detmath::normal_interval(-10.5, -10.0, 0.0, 1.0);
  EXPECT_LT(rel_err(q, want), 1e-12);
  EXPECT_NEAR(detmath::normal_interval(-0.5, 0.5, 0.0, 1.0), 0.3829249225480262, 1e-15);
  EXPECT_NEAR(detmath::normal_cdf(0.0) + detmath::normal_sf(0.0), 1.0, 0.0);
}

}  // namespace
}  // namespace smolgs
