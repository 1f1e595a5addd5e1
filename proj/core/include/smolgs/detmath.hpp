#pragma once

// Transcendentals built only from +, -, *, / and exact scaling, so the
// results are bit-identical on every IEEE-754 binary64 platform (the library
// is compiled without FMA contraction). Everything that feeds symbol models
// goes through these instead of <cmath>.

namespace smolgs::detmath {

double exp(double x);
/// Natural log for x > 0; -inf at 0, NaN below.
double log(double x);
double log1p(double t);
/// log(1 + exp(z)) without overflow.
double softplus(double z);
double sigmoid(double z);
double erfc(double x);
/// Standard normal CDF.
double normal_cdf(double z);
/// Upper tail 1 - normal_cdf(z), accurate for large z.
double normal_sf(double z);
/// Mass of N(mu, sigma^2) on [a, b], computed from the tail nearer to the
/// interval to avoid cancellation.
double normal_interval(double a, double b, double mu, double sigma);

}  // namespace smolgs::detmath
