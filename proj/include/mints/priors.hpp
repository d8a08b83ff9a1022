#ifndef MINTS_PRIORS_HPP
#define MINTS_PRIORS_HPP

#include "mints/panel_data.hpp"
#include "mints/types.hpp"

namespace mints {

// Data-based prior control parameters, estimated from observed first
// differences and early-window complete cases. Fixed priors of the model
// (beta ~ N(0,1), rho ~ U(0,1), mu_0 ~ N(nu_0, zeta_0^2) with nu_0 = 0)
// live here as well.
struct ControlParams {
  // X model
  double delta_X = 0.0;   // InvGamma rate for sigma_X^2
  double nu_drift = 0.0;  // prior mean of mu_drift
  double zeta_drift = 0.0; // prior SD of mu_drift
  double delta_drift = 0.0; // InvGamma rate for sigma_drift^2
  // Y model
  double delta_Y = 0.0; // InvGamma rate for sigma_Y^2
  double zeta_0 = 0.0;  // prior SD of mu_0
  double delta_0 = 0.0; // InvGamma rate for sigma_0^2
  double nu_0 = 0.0;    // prior mean of mu_0
  // Early-window joint prior for (Y_0, X_0): mean (Y, X) and covariance.
  Vector2 mu_early = Vector2::Zero();
  Matrix2 sigma_early = Matrix2::Identity();
  double r_early = 0.0; // Pearson correlation inside sigma_early
  int early_lo = 0, early_hi = 0; // calendar-year window actually used
  bool early_fallback = false;    // true when the window lacked cases

  double sd_y_early() const { return std::sqrt(sigma_early(0, 0)); }
  double sd_x_early() const { return std::sqrt(sigma_early(1, 1)); }
};

struct YearWindow {
  int lo = 0;
  int hi = 0; // inclusive calendar years; {0, 0} means "first 11 grid years"
};

// Appendix-style moment estimates: delta_X the sample variance of observed
// consecutive X first differences, nu_drift their grand mean, zeta_drift the
// standard error of that mean, delta_drift the variance of country-mean
// differences; analogously for Y. Variance-like quantities are floored at
// 1e-4. Throws when fewer than 2 usable differences exist for either
// variable, naming the quantity.
ControlParams compute_control_params(const PanelDataset& d, YearWindow early = YearWindow{});

} // namespace mints

#endif
