#ifndef MINTS_SIMGEN_HPP
#define MINTS_SIMGEN_HPP

#include <cstdint>

#include "mints/panel_data.hpp"
#include "mints/rng.hpp"

namespace mints {

// Generative constants for the synthetic panels. The named factories carry
// the two published regimes; every constant is overridable.
struct SimConfig {
  int n_countries = 20;
  int n_years = 30;
  std::uint64_t seed = 1;

  // X random walk
  double x1_low = 0.0, x1_up = 25.0; // first-year uniform
  double x_low = 0.0, x_up = 100.0;  // truncation support
  double x_step_var = 1.0;           // sigma^2 of the walk
  bool drift_uniform = true;         // U(drift_a, drift_b) vs N(drift_a, drift_b^2)
  double drift_a = 1.0, drift_b = 3.0;

  // Y | X mean: alpha_c + logistic_scale / (1 + exp(-(x - logistic_center)/logistic_rate))
  //             + log_coef * log(x) + linear_coef * x
  double alpha_low = 0.0, alpha_up = 5.0;
  double logistic_scale = 40.0, logistic_center = 60.0, logistic_rate = 8.0;
  double log_coef = 3.0;
  double linear_coef = 0.0;
  double y_var = 1.0;
  double y_low = 0.0, y_cap = 60.0;

  // Analysis outcome Z ~ N(eta_c + z_slope * Y, z_noise_sd^2), eta_c ~ U(0, eta_up)
  double eta_low = 0.0, eta_up = 15.0;
  double z_slope = 2.0;
  double z_noise_sd = 10.0;

  static SimConfig nonlinear();
  static SimConfig linear();

  double mean_y(double alpha, double x) const;
};

// Fully observed panel drawn from the configured regime. The rare exact
// X = 0 is clamped to 1e-6 before the log term; log_floor_hits counts it.
PanelDataset gen_panel(const SimConfig& cfg, RngStream& rng, long* log_floor_hits = nullptr);

// Analysis-only outcome grid; never amputed.
Matrix gen_outcome_z(const Matrix& y_grid, const SimConfig& cfg, RngStream& rng);

} // namespace mints

#endif
