#include "mints/priors.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace mints {

namespace {

constexpr double kVarFloor = 1e-4;

double sample_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_var(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = sample_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

// Consecutive-year first differences with both endpoints observed; gaps are
// skipped, never interpolated.
void collect_differences(const Matrix& values, const BoolGrid& mask, std::vector<double>& all,
                         std::vector<double>& country_means) {
  for (Index c = 0; c < values.rows(); ++c) {
    std::vector<double> diffs;
    for (Index t = 1; t < values.cols(); ++t)
      if (mask(c, t) && mask(c, t - 1)) diffs.push_back(values(c, t) - values(c, t - 1));
    if (!diffs.empty()) {
      country_means.push_back(sample_mean(diffs));
      all.insert(all.end(), diffs.begin(), diffs.end());
    }
  }
}

} // namespace

ControlParams compute_control_params(const PanelDataset& d, YearWindow early) {
  ControlParams cp;

  std::vector<double> x_diffs, x_country;
  collect_differences(d.x_values, d.x_mask, x_diffs, x_country);
  if (x_diffs.size() < 2)
    throw std::invalid_argument("prior construction: fewer than 2 observed X first differences");
  cp.delta_X = std::max(sample_var(x_diffs), kVarFloor);
  cp.nu_drift = sample_mean(x_diffs);
  cp.zeta_drift =
      std::max(std::sqrt(sample_var(x_diffs) / static_cast<double>(x_diffs.size())),
               std::sqrt(kVarFloor));
  cp.delta_drift = std::max(sample_var(x_country), kVarFloor);

  std::vector<double> y_diffs, y_country;
  collect_differences(d.y_values, d.y_mask, y_diffs, y_country);
  if (y_diffs.size() < 2)
    throw std::invalid_argument("prior construction: fewer than 2 observed Y first differences");
  cp.delta_Y = std::max(sample_var(y_diffs), kVarFloor);
  cp.zeta_0 =
      std::max(std::sqrt(sample_var(y_diffs) / static_cast<double>(y_diffs.size())),
               std::sqrt(kVarFloor));
  cp.delta_0 = std::max(sample_var(y_country), kVarFloor);
  cp.nu_0 = 0.0;

  // Early-window complete cases for the (Y_0, X_0) prior. Default window:
  // the first 11 grid years.
  if (early.lo == 0 && early.hi == 0) {
    early.lo = d.first_year;
    early.hi = d.first_year + std::min<int>(10, static_cast<int>(d.n_years()) - 1);
  }
  auto gather = [&](int lo, int hi, std::vector<double>& ex, std::vector<double>& ey) {
    for (Index c = 0; c < d.n_countries(); ++c)
      for (Index t = 0; t < d.n_years(); ++t) {
        const int year = d.year_of(t);
        if (year < lo || year > hi) continue;
        if (d.x_mask(c, t) && d.y_mask(c, t)) {
          ex.push_back(d.x_values(c, t));
          ey.push_back(d.y_values(c, t));
        }
      }
  };
  std::vector<double> ex, ey;
  gather(early.lo, early.hi, ex, ey);
  cp.early_lo = early.lo;
  cp.early_hi = early.hi;
  if (ex.size() < 2) {
    // Window too sparse: fall back to all complete cases.
    ex.clear();
    ey.clear();
    gather(d.first_year, d.year_of(d.n_years() - 1), ex, ey);
    cp.early_fallback = true;
    cp.early_lo = d.first_year;
    cp.early_hi = d.year_of(d.n_years() - 1);
  }
  if (ex.size() < 2)
    throw std::invalid_argument("prior construction: fewer than 2 early-window complete cases");

  const double mx = sample_mean(ex), my = sample_mean(ey);
  double sx = std::sqrt(std::max(sample_var(ex), kVarFloor));
  double sy = std::sqrt(std::max(sample_var(ey), kVarFloor));
  double sxy = 0.0;
  for (std::size_t i = 0; i < ex.size(); ++i) sxy += (ex[i] - mx) * (ey[i] - my);
  sxy /= static_cast<double>(ex.size() - 1);
  double r = sxy / (sx * sy);
  // Keep sigma_early invertible.
  if (r > 0.99) r = 0.99;
  if (r < -0.99) r = -0.99;
  cp.r_early = r;
  cp.mu_early << my, mx;
  cp.sigma_early << sy * sy, r * sx * sy, r * sx * sy, sx * sx;
  return cp;
}

} // namespace mints
