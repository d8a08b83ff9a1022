#ifndef MINTS_MATH_HPP
#define MINTS_MATH_HPP

#include <cmath>
#include <limits>
#include <stdexcept>

// Scalar special functions used across the library: normal cdf/quantile,
// regularized incomplete beta, and Student-t quantiles.

namespace mints {

template <typename Scalar>
Scalar norm_pdf(Scalar x) {
  const Scalar inv_sqrt_2pi = Scalar(0.3989422804014326779);
  return inv_sqrt_2pi * std::exp(Scalar(-0.5) * x * x);
}

template <typename Scalar>
Scalar norm_cdf(Scalar x) {
  return Scalar(0.5) * std::erfc(-x * Scalar(0.70710678118654752440));
}

// Upper tail P(Z > x); accurate for large x where 1 - norm_cdf loses digits.
template <typename Scalar>
Scalar norm_sf(Scalar x) {
  return Scalar(0.5) * std::erfc(x * Scalar(0.70710678118654752440));
}

// Wichura's PPND16 (AS 241): inverse standard normal cdf, ~1e-16 relative.
template <typename Scalar>
Scalar norm_quantile(Scalar p) {
  if (!(p > Scalar(0)) || !(p < Scalar(1))) {
    if (p == Scalar(0)) return -std::numeric_limits<Scalar>::infinity();
    if (p == Scalar(1)) return std::numeric_limits<Scalar>::infinity();
    throw std::domain_error("norm_quantile: p outside [0, 1]");
  }
  const Scalar q = p - Scalar(0.5);
  if (std::abs(q) <= Scalar(0.425)) {
    const Scalar r = Scalar(0.180625) - q * q;
    return q *
           (((((((Scalar(2509.0809287301226727) * r + Scalar(33430.575583588128105)) * r + Scalar(67265.770927008700853)) * r + Scalar(45921.953931549871457)) * r + Scalar(13731.693765509461125)) * r + Scalar(1971.5909503065514427)) * r + Scalar(133.14166789178437745)) * r + Scalar(3.387132872796366608)) /
           (((((((Scalar(5226.495278852545703) * r + Scalar(28729.085735721942674)) * r + Scalar(39307.89580009271061)) * r + Scalar(21213.794301586595867)) * r + Scalar(5394.1960214247511077)) * r + Scalar(687.1870074920579083)) * r + Scalar(42.313330701600911252)) * r + Scalar(1));
  }
  Scalar r = (q < Scalar(0)) ? p : Scalar(1) - p;
  r = std::sqrt(-std::log(r));
  Scalar val;
  if (r <= Scalar(5)) {
    r -= Scalar(1.6);
    val = (((((((Scalar(7.7454501427834140764e-4) * r + Scalar(0.0227238449892691845833)) * r + Scalar(0.24178072517745061177)) * r + Scalar(1.27045825245236838258)) * r + Scalar(3.64784832476320460504)) * r + Scalar(5.7694972214606914055)) * r + Scalar(4.6303378461565452959)) * r + Scalar(1.42343711074968357734)) /
          (((((((Scalar(1.05075007164441684324e-9) * r + Scalar(5.475938084995344946e-4)) * r + Scalar(0.0151986665636164571966)) * r + Scalar(0.14810397642748007459)) * r + Scalar(0.68976733498510000455)) * r + Scalar(1.6763848301838038494)) * r + Scalar(2.05319162663775882187)) * r + Scalar(1));
  } else {
    r -= Scalar(5);
    val = (((((((Scalar(2.01033439929228813265e-7) * r + Scalar(2.71155556874348757815e-5)) * r + Scalar(0.0012426609473880784386)) * r + Scalar(0.026532189526576123093)) * r + Scalar(0.29656057182850489123)) * r + Scalar(1.7848265399172913358)) * r + Scalar(5.4637849111641143699)) * r + Scalar(6.6579046435011037772)) /
          (((((((Scalar(2.04426310338993978564e-15) * r + Scalar(1.4215117583164458887e-7)) * r + Scalar(1.8463183175100546818e-5)) * r + Scalar(7.868691311456132591e-4)) * r + Scalar(0.0148753612908506148525)) * r + Scalar(0.13692988092273580531)) * r + Scalar(0.59983220655588793769)) * r + Scalar(1));
  }
  return (q < Scalar(0)) ? -val : val;
}

namespace detail {

// Continued fraction for the regularized incomplete beta (Lentz's method).
inline double betacf(double a, double b, double x) {
  constexpr int max_iter = 300;
  constexpr double eps = 3e-16;
  constexpr double fpmin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::abs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h;
}

} // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double inc_beta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0) throw std::domain_error("inc_beta: a, b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0))
    return std::exp(ln_front) * detail::betacf(a, b, x) / a;
  return 1.0 - std::exp(ln_front) * detail::betacf(b, a, 1.0 - x) / b;
}

// Student-t cdf for nu > 0.
inline double t_cdf(double t, double nu) {
  if (!(nu > 0.0)) throw std::domain_error("t_cdf: nu must be positive");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double x = nu / (nu + t * t);
  const double tail = 0.5 * inc_beta(0.5 * nu, 0.5, x);
  return t > 0 ? 1.0 - tail : tail;
}

// Student-t quantile; nu = +inf falls back to the normal quantile.
inline double t_quantile(double p, double nu) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("t_quantile: p outside (0, 1)");
  if (std::isinf(nu)) return norm_quantile(p);
  if (!(nu > 0.0)) throw std::domain_error("t_quantile: nu must be positive");
  if (p == 0.5) return 0.0;
  // Bisection on the cdf; bracket grows geometrically from the normal start.
  double lo = norm_quantile(p), hi = lo;
  if (p > 0.5) {
    if (lo <= 0.0) lo = 0.0;
    hi = std::max(1.0, 2.0 * lo);
    while (t_cdf(hi, nu) < p) hi *= 2.0;
    lo = 0.0;
  } else {
    if (hi >= 0.0) hi = 0.0;
    lo = std::min(-1.0, 2.0 * lo);
    while (t_cdf(lo, nu) > p) lo *= 2.0;
    hi = 0.0;
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (t_cdf(mid, nu) < p)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-12 * (1.0 + std::abs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

} // namespace mints

#endif
