#include "smolgs/detmath.hpp"

#include <cmath>
#include <limits>

namespace smolgs::detmath {

namespace {

constexpr double kLn2Hi = 6.93147180369123816490e-01;  // low 32 bits zero
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr double kInvLn2 = 1.44269504088896338700e+00;
constexpr double kSqrtHalf = 0.70710678118654752440;
constexpr double kInvSqrtPi = 0.56418958354775628695;
constexpr double kTwoOverSqrtPi = 1.12837916709551257390;

// 2 * atanh(u) for |u| <= 1/3; 2u * sum u^(2k) / (2k + 1).
double two_atanh(double u) {
  const double u2 = u * u;
  double sum = 0.0;
  for (int k = 24; k >= 0; --k) sum = sum * u2 + 1.0 / static_cast<double>(2 * k + 1);
  return 2.0 * u * sum;
}

// erf by its Maclaurin series; used for |x| < 2.
double erf_series(double x) {
  const double x2 = x * x;
  double term = x;
  double sum = x;
  for (int n = 1; n < 60; ++n) {
    term = -term * x2 / static_cast<double>(n);
    const double add = term / static_cast<double>(2 * n + 1);
    sum += add;
    if (std::fabs(add) < 1e-18 * std::fabs(sum)) break;
  }
  return kTwoOverSqrtPi * sum;
}

// erfc by the Laplace continued fraction, evaluated bottom-up with a fixed
// depth; used for x >= 2.
double erfc_fraction(double x) {
  double tail = x;
  for (int k = 80; k >= 1; --k) tail = x + (0.5 * static_cast<double>(k)) / tail;
  return exp(-x * x) * kInvSqrtPi / tail;
}

}  // namespace

double exp(double x) {
  if (std::isnan(x)) return x;
  if (x > 709.78) return std::numeric_limits<double>::infinity();
  if (x < -745.2) return 0.0;
  const double k = std::floor(x * kInvLn2 + 0.5);
  const double r = (x - k * kLn2Hi) - k * kLn2Lo;  // |r| <= ~0.347
  double sum = 1.0;
  for (int n = 17; n >= 1; --n) sum = 1.0 + sum * r / static_cast<double>(n);
  return std::ldexp(sum, static_cast<int>(k));
}

double log(double x) {
  if (std::isnan(x) || x < 0) return std::numeric_limits<double>::quiet_NaN();
  if (x == 0) return -std::numeric_limits<double>::infinity();
  if (std::isinf(x)) return x;
  int e = 0;
  double m = std::frexp(x, &e);  // x = m * 2^e, m in [0.5, 1)
  if (m < kSqrtHalf) {
    m *= 2.0;
    --e;
  }
  const double u = (m - 1.0) / (m + 1.0);
  const double ed = static_cast<double>(e);
  return ed * kLn2Hi + (two_atanh(u) + ed * kLn2Lo);
}

double log1p(double t) {
  if (t == 0) return t;
  if (t > -0.5 && t <= 1.0) return two_atanh(t / (2.0 + t));
  return log(1.0 + t);
}

double softplus(double z) {
  if (z > 40) return z;
  return (z > 0 ? z : 0.0) + log1p(exp(-std::fabs(z)));
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + exp(-z));
  const double e = exp(z);
  return e / (1.0 + e);
}

double erfc(double x) {
  if (std::isnan(x)) return x;
  if (x < 0) return 2.0 - erfc(-x);
  if (x < 2.0) return 1.0 - erf_series(x);
  if (x > 27.3) return 0.0;
  return erfc_fraction(x);
}

double normal_cdf(double z) { return 0.5 * erfc(-z * kSqrtHalf); }

double normal_sf(double z) { return 0.5 * erfc(z * kSqrtHalf); }

double normal_interval(double a, double b, double mu, double sigma) {
  const double za = (a - mu) / sigma;
  const double zb = (b - mu) / sigma;
  if (za >= 0) return normal_sf(za) - normal_sf(zb);
  return normal_cdf(zb) - normal_cdf(za);
}

}  // namespace smolgs::detmath
