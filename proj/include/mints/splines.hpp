#ifndef MINTS_SPLINES_HPP
#define MINTS_SPLINES_HPP

#include "mints/types.hpp"

namespace mints {

// Piecewise-linear function as a degree-1 B-spline: with simple knots the
// basis functions are hats, so coefficients are the fitted values at the
// knots. Evaluation clips to range_clip and extrapolates as a constant
// beyond the outermost knots.
struct LinearSpline {
  Vector knots;        // strictly increasing
  Vector coefficients; // one per knot
  double clip_lo = -kInf;
  double clip_hi = kInf;
};

// Mean function f and dispersion function h of the Y | X model.
// h is clipped below at a small positive floor so it can scale a variance.
struct SplinePair {
  LinearSpline f;
  LinearSpline h;
};

struct AsplineConfig {
  int max_knots = 40;     // cap on initial interior knots (rest is n/4)
  int bic_grid = 30;      // penalty-strength grid size
  double lambda_min = 1e-6;
  double lambda_max = 1e6;
  int ridge_iters = 50;   // adaptive-ridge reweighting cap
  double ridge_tol = 1e-6;
};

// Degree-1 B-spline basis weights at x: nonnegative, at most two nonzero,
// summing to one inside the knot span. Throws on unsorted knots.
Vector bspline_basis_deg1(const Vector& knots, double x);

double evaluate(const LinearSpline& s, double x);

// Adaptive-knot least squares: candidate interior knots at x-quantiles,
// iterative adaptive-ridge reweighting on order-2 coefficient differences
// (knot-spacing aware), then BIC selection over the penalty grid followed by
// an unpenalized refit on the retained knots. Throws on fewer than 4 points
// or constant x.
LinearSpline fit_adaptive_spline(const Vector& xs, const Vector& ys,
                                 const AsplineConfig& config = AsplineConfig{});

// Fits f to (x, y) and h to (x, |y - f(x)|), both by fit_adaptive_spline,
// then clips f into [y_lo, y_hi] and h into [eps, inf). With fewer than 4
// cases falls back to a linear f and a constant h at the residual SD.
SplinePair estimate_f_h(const Vector& xs, const Vector& ys, double y_lo, double y_hi,
                        double eps, const AsplineConfig& config = AsplineConfig{});

} // namespace mints

#endif
