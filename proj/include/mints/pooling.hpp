#ifndef MINTS_POOLING_HPP
#define MINTS_POOLING_HPP

#include "mints/types.hpp"

namespace mints {

// Rubin-pooled estimate of a scalar quantity across M imputations.
struct PooledEstimate {
  double q_bar = 0.0;   // pooled point estimate
  double u_bar = 0.0;   // mean within-imputation variance
  double b = 0.0;       // between-imputation variance
  double t_total = 0.0; // u_bar + (1 + 1/M) b
  double r_m = 0.0;     // relative variance increase from nonresponse
  double nu = 0.0;      // degrees of freedom (+inf when b = 0)
  double fmi = 0.0;     // fraction of missing information
  double ci_low = 0.0;
  double ci_high = 0.0;
  int m = 0;
  bool zero_between = false;    // b was exactly 0: nu = +inf, fmi reported 0
  bool fmi_exploratory = false; // M < 100, echoing the small-M caveat
};

// Combining rules: T = U + (1 + 1/M) B, nu = (M-1)(1 + 1/r)^2,
// FMI = (r + 2/(nu+3)) / (r + 1), CI via the Student-t critical value.
PooledEstimate pool(const Vector& q_hats, const Vector& u_hats, double level = 0.95);

} // namespace mints

#endif
