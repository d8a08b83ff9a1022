#include "mints/distributions.hpp"

#include <cmath>
#include <stdexcept>

namespace mints {

namespace {

constexpr double kTailSwitch = 4.0;

// Robert (1995) exponential rejection for Z | Z >= a with a > 0.
double tail_rejection(double a, RngStream& rng) {
  const double lambda = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double z = a - std::log(rng.uniform()) / lambda;
    const double log_acc = -0.5 * (z - lambda) * (z - lambda);
    if (std::log(rng.uniform()) <= log_acc) return z;
  }
}

// Standardized truncated standard normal on [a, b].
double sample_std_trunc(double a, double b, RngStream& rng) {
  if (a >= kTailSwitch && std::isinf(b)) return tail_rejection(a, rng);
  if (b <= -kTailSwitch && std::isinf(a)) return -tail_rejection(-b, rng);
  if (a >= kTailSwitch) {
    // Two-sided right tail: interpolate in upper-tail probability, where
    // erfc keeps full precision.
    const double pa = norm_sf(a), pb = norm_sf(b);
    const double p = pb + rng.uniform() * (pa - pb);
    return -norm_quantile(p);
  }
  if (b <= -kTailSwitch) {
    const double pa = norm_cdf(a), pb = norm_cdf(b);
    const double p = pa + rng.uniform() * (pb - pa);
    return norm_quantile(p);
  }
  const double fa = std::isinf(a) ? 0.0 : norm_cdf(a);
  const double fb = std::isinf(b) ? 1.0 : norm_cdf(b);
  if (fb - fa < 1e-15) return 0.5 * (std::max(a, -38.0) + std::min(b, 38.0));
  return norm_quantile(fa + rng.uniform() * (fb - fa));
}

} // namespace

double sample_trunc_normal(double mu, double var, double low, double up, RngStream& rng) {
  if (!(var > 0.0)) throw std::domain_error("sample_trunc_normal: var must be positive");
  if (!(low < up)) throw std::domain_error("sample_trunc_normal: requires low < up");
  const double sd = std::sqrt(var);
  const double a = (low - mu) / sd;
  const double b = (up - mu) / sd;
  double z = sample_std_trunc(a, b, rng);
  double x = mu + sd * z;
  // Guard against rounding at degenerate-width intervals.
  if (x < low) x = low;
  if (x > up) x = up;
  return x;
}

double sample_gamma(double shape, double rate, RngStream& rng) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::domain_error("sample_gamma: shape and rate must be positive");
  // Marsaglia-Tsang; shape < 1 boosted via the u^{1/shape} identity.
  double boost = 1.0;
  double k = shape;
  if (k < 1.0) {
    boost = std::pow(rng.uniform(), 1.0 / k);
    k += 1.0;
  }
  const double d = k - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double zn, v;
    do {
      zn = rng.normal();
      v = 1.0 + c * zn;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * zn * zn * zn * zn) return boost * d * v / rate;
    if (std::log(u) < 0.5 * zn * zn + d * (1.0 - v + std::log(v))) return boost * d * v / rate;
  }
}

double sample_inverse_gamma(double shape, double rate, RngStream& rng) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::domain_error("sample_inverse_gamma: shape and rate must be positive");
  return rate / sample_gamma(shape, 1.0, rng);
}

double normal_interval_prob(double mu, double var, double low, double up) {
  const double sd = std::sqrt(var);
  const double a = (low - mu) / sd;
  const double b = (up - mu) / sd;
  if (a > 0.0) return norm_sf(a) - norm_sf(b); // both tails right: use sf
  const double fa = std::isinf(a) ? 0.0 : norm_cdf(a);
  const double fb = std::isinf(b) ? 1.0 : norm_cdf(b);
  return fb - fa;
}

Vector2 sample_trunc_bivariate_normal(const Vector2& mean, const Matrix2& cov,
                                      const Box2& box, RngStream& rng) {
  const double det = cov(0, 0) * cov(1, 1) - cov(0, 1) * cov(1, 0);
  if (!(cov(0, 0) > 0.0) || !(cov(1, 1) > 0.0) || !(det > 0.0) ||
      std::abs(cov(0, 1) - cov(1, 0)) > 1e-12 * std::sqrt(cov(0, 0) * cov(1, 1)))
    throw std::domain_error("sample_trunc_bivariate_normal: cov must be symmetric positive definite");
  if (!(box.low1 < box.up1) || !(box.low2 < box.up2))
    throw std::domain_error("sample_trunc_bivariate_normal: degenerate box");

  const bool trunc1 = std::isfinite(box.low1) || std::isfinite(box.up1);
  const bool trunc2 = std::isfinite(box.low2) || std::isfinite(box.up2);

  const double l11 = std::sqrt(cov(0, 0));
  const double l21 = cov(1, 0) / l11;
  const double l22 = std::sqrt(cov(1, 1) - l21 * l21);

  if (!trunc1 && !trunc2) {
    const double z1 = rng.normal(), z2 = rng.normal();
    return {mean(0) + l11 * z1, mean(1) + l21 * z1 + l22 * z2};
  }

  // Marginal-probability product as the acceptance estimate for rejection.
  const double p1 = trunc1 ? normal_interval_prob(mean(0), cov(0, 0), box.low1, box.up1) : 1.0;
  const double p2 = trunc2 ? normal_interval_prob(mean(1), cov(1, 1), box.low2, box.up2) : 1.0;
  if (p1 * p2 > 0.10) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const double z1 = rng.normal(), z2 = rng.normal();
      const double x1 = mean(0) + l11 * z1;
      const double x2 = mean(1) + l21 * z1 + l22 * z2;
      if (x1 >= box.low1 && x1 <= box.up1 && x2 >= box.low2 && x2 <= box.up2) return {x1, x2};
    }
    // Fall through to the Gibbs pass if rejection stalls.
  }

  // Gibbs over the two full conditionals, fixed sweep count.
  const double s1 = cov(0, 0), s2 = cov(1, 1), s12 = cov(0, 1);
  const double cvar1 = s1 - s12 * s12 / s2;
  const double cvar2 = s2 - s12 * s12 / s1;
  auto clamp = [](double v, double lo, double hi) { return std::min(std::max(v, lo), hi); };
  double x1 = clamp(mean(0), box.low1, box.up1);
  double x2 = clamp(mean(1), box.low2, box.up2);
  if (!std::isfinite(x1)) x1 = std::isfinite(box.low1) ? box.low1 : box.up1;
  if (!std::isfinite(x2)) x2 = std::isfinite(box.low2) ? box.low2 : box.up2;
  constexpr int kSweeps = 20;
  for (int s = 0; s < kSweeps; ++s) {
    const double m1 = mean(0) + s12 / s2 * (x2 - mean(1));
    x1 = sample_trunc_normal(m1, cvar1, box.low1, box.up1, rng);
    const double m2 = mean(1) + s12 / s1 * (x1 - mean(0));
    x2 = sample_trunc_normal(m2, cvar2, box.low2, box.up2, rng);
  }
  return {x1, x2};
}

} // namespace mints
