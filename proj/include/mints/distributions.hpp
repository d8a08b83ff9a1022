#ifndef MINTS_DISTRIBUTIONS_HPP
#define MINTS_DISTRIBUTIONS_HPP

#include "mints/rng.hpp"
#include "mints/types.hpp"

namespace mints {

// Truncated normal on [low, up] (either side may be infinite). Inverse-cdf
// in the bulk; for far-tail regions the draw switches to accurate tail
// parameterizations (complementary inverse-cdf, exponential rejection for
// one-sided truncation past 4 standardized units).
double sample_trunc_normal(double mu, double var, double low, double up, RngStream& rng);

// Gamma(shape, rate) via Marsaglia-Tsang; used by the inverse-gamma draw.
double sample_gamma(double shape, double rate, RngStream& rng);

// InvGamma(shape, rate) with density proportional to x^{-shape-1} exp(-rate/x),
// so the posterior rate is delta + sum-of-squares/2 in the conditionals.
double sample_inverse_gamma(double shape, double rate, RngStream& rng);

// Per-coordinate truncation box for the bivariate draw.
struct Box2 {
  double low1 = -kInf, up1 = kInf;
  double low2 = -kInf, up2 = kInf;
};

// Bivariate normal restricted to an axis-aligned box. Direct Cholesky +
// rejection when the estimated acceptance exceeds 10%; otherwise a fixed
// 20-sweep Gibbs pass over the two univariate conditionals.
Vector2 sample_trunc_bivariate_normal(const Vector2& mean, const Matrix2& cov,
                                      const Box2& box, RngStream& rng);

// Probability a N(mu, var) variate lands in [low, up]; tail-safe.
double normal_interval_prob(double mu, double var, double low, double up);

} // namespace mints

#endif
