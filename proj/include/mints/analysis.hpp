#ifndef MINTS_ANALYSIS_HPP
#define MINTS_ANALYSIS_HPP

#include <vector>

#include "mints/types.hpp"

namespace mints {

// Substantive analysis-model fit: intercept/slope with classical standard
// errors, plus variance components when the model has a random intercept.
struct FitResult {
  double intercept = 0.0;
  double slope = 0.0;
  double se_intercept = 0.0;
  double se_slope = 0.0;
  double var_random_intercept = 0.0; // mixed model only
  double var_residual = 0.0;
  Index n = 0;
  bool boundary = false; // variance-ratio optimum hit theta = 0
};

// Least squares of y on x with n-2 denominator standard errors.
FitResult fit_ols(const Vector& y, const Vector& x);

// Random intercept model y = b0 + b1 x + u_g + e, u_g ~ N(0, s_g^2),
// e ~ N(0, s_e^2). REML by 1-D profile search over theta = s_g^2 / s_e^2
// with closed-form GLS fixed effects at each theta.
FitResult fit_random_intercept(const Vector& y, const Vector& x,
                               const std::vector<int>& groups);

// Profiled REML criterion at a given theta (larger is better); exposed so
// a brute-force grid can validate the optimizer.
double reml_profile(const Vector& y, const Vector& x, const std::vector<int>& groups,
                    double theta);

} // namespace mints

#endif
