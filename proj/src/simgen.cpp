#include "mints/simgen.hpp"

#include <cmath>
#include <stdexcept>

#include "mints/distributions.hpp"

namespace mints {

SimConfig SimConfig::nonlinear() { return SimConfig{}; }

SimConfig SimConfig::linear() {
  SimConfig c;
  c.x1_low = 2.0;
  c.x1_up = 20.0;
  c.x_step_var = 2.0;
  c.drift_uniform = false;
  c.drift_a = 2.0;
  c.drift_b = 0.5; // SD of the normal drift
  c.logistic_scale = 0.0;
  c.log_coef = 0.0;
  c.linear_coef = 0.75;
  c.y_cap = 100.0;
  return c;
}

double SimConfig::mean_y(double alpha, double x) const {
  double m = alpha + linear_coef * x;
  if (logistic_scale != 0.0)
    m += logistic_scale / (1.0 + std::exp(-(x - logistic_center) / logistic_rate));
  if (log_coef != 0.0) m += log_coef * std::log(x);
  return m;
}

PanelDataset gen_panel(const SimConfig& cfg, RngStream& rng, long* log_floor_hits) {
  if (cfg.n_countries < 2 || cfg.n_years < 2)
    throw std::invalid_argument("gen_panel: need at least 2 countries and 2 years");

  const Index C = cfg.n_countries, T = cfg.n_years;
  PanelDataset d;
  d.first_year = 1;
  d.country_ids.reserve(C);
  for (Index c = 0; c < C; ++c) {
    // Zero-padded labels keep the alphabetical country indexing stable.
    std::string id = "C" + std::to_string(c + 1);
    while (id.size() < 4) id.insert(1, "0");
    d.country_ids.push_back(id);
  }
  d.x_values.resize(C, T);
  d.y_values.resize(C, T);
  d.x_mask = BoolGrid::Constant(C, T, true);
  d.y_mask = BoolGrid::Constant(C, T, true);

  for (Index c = 0; c < C; ++c) {
    const double gamma = cfg.drift_uniform ? rng.uniform(cfg.drift_a, cfg.drift_b)
                                           : rng.normal(cfg.drift_a, cfg.drift_b * cfg.drift_b);
    const double alpha = rng.uniform(cfg.alpha_low, cfg.alpha_up);

    d.x_values(c, 0) = rng.uniform(cfg.x1_low, cfg.x1_up);
    for (Index t = 1; t < T; ++t)
      d.x_values(c, t) = sample_trunc_normal(d.x_values(c, t - 1) + gamma, cfg.x_step_var,
                                             cfg.x_low, cfg.x_up, rng);

    for (Index t = 0; t < T; ++t) {
      double x = d.x_values(c, t);
      if (cfg.log_coef != 0.0 && x <= 0.0) {
        x = 1e-6;
        if (log_floor_hits) ++*log_floor_hits;
      }
      const double up = std::min(d.x_values(c, t), cfg.y_cap);
      if (cfg.y_low < up)
        d.y_values(c, t) =
            sample_trunc_normal(cfg.mean_y(alpha, x), cfg.y_var, cfg.y_low, up, rng);
      else
        d.y_values(c, t) = cfg.y_low;
    }
  }

  BoundsSpec bounds;
  bounds.x_low = cfg.x_low;
  bounds.x_up = cfg.x_up;
  bounds.y_low = cfg.y_low;
  bounds.y_cap = cfg.y_cap;
  attach_bounds(d, bounds);
  validate(d);
  return d;
}

Matrix gen_outcome_z(const Matrix& y_grid, const SimConfig& cfg, RngStream& rng) {
  Matrix z(y_grid.rows(), y_grid.cols());
  for (Index c = 0; c < y_grid.rows(); ++c) {
    const double eta = rng.uniform(cfg.eta_low, cfg.eta_up);
    for (Index t = 0; t < y_grid.cols(); ++t)
      z(c, t) = eta + cfg.z_slope * y_grid(c, t) + cfg.z_noise_sd * rng.normal();
  }
  return z;
}

} // namespace mints
