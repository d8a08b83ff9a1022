#include "mints/amputation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "mints/rng.hpp"

namespace mints {

AmputationPlan AmputationPlan::simulated(Mechanism m, double rate, std::uint64_t seed) {
  AmputationPlan p;
  p.mechanism = m;
  p.rate = rate;
  p.seed = seed;
  p.noise_sd_x = m == Mechanism::MNAR ? 40.0 : 10.0;
  p.noise_sd_y = m == Mechanism::MNAR ? 40.0 : 10.0;
  return p;
}

AmputationPlan AmputationPlan::enrollment(Mechanism m, double rate, std::uint64_t seed) {
  AmputationPlan p;
  p.mechanism = m;
  p.rate = rate;
  p.seed = seed;
  p.noise_sd_x = m == Mechanism::MNAR ? 25.0 : 40.0;
  p.noise_sd_y = m == Mechanism::MNAR ? 15.0 : 40.0;
  return p;
}

namespace {

struct ScoredCell {
  double score;
  Index c, t;
};

// Flags the lowest rate-quantile of scores as missing. The boundary is the
// order statistic at index ceil(rate * n); cells strictly below it (ties
// broken by (country, year)) are amputed, so the count is within one of
// rate * n for every mechanism.
void ampute_variable(const Matrix& values, const BoolGrid& observed, Mechanism mech,
                     double rate, double noise_sd, RngStream& rng, BoolGrid& test_mask) {
  std::vector<ScoredCell> cells;
  for (Index c = 0; c < values.rows(); ++c)
    for (Index t = 0; t < values.cols(); ++t) {
      if (!observed(c, t)) continue;
      double center = 0.0;
      switch (mech) {
        case Mechanism::MCAR: center = 0.0; break;
        case Mechanism::MAR: center = static_cast<double>(t + 1); break; // year index
        case Mechanism::MNAR: center = values(c, t); break;
      }
      const double sd = mech == Mechanism::MCAR ? 1.0 : noise_sd;
      cells.push_back({center + sd * rng.normal(), c, t});
    }
  const std::size_t n = cells.size();
  if (n == 0) return;
  std::stable_sort(cells.begin(), cells.end(), [](const ScoredCell& a, const ScoredCell& b) {
    if (a.score != b.score) return a.score < b.score;
    if (a.c != b.c) return a.c < b.c;
    return a.t < b.t;
  });
  const std::size_t k = static_cast<std::size_t>(std::ceil(rate * static_cast<double>(n)));
  const std::size_t n_ampute = k > 0 ? k - 1 : 0; // strictly below the boundary statistic
  for (std::size_t i = 0; i < n_ampute && i < n; ++i) test_mask(cells[i].c, cells[i].t) = true;
}

} // namespace

SplitDataset ampute(const PanelDataset& d, const AmputationPlan& plan) {
  if (!(plan.rate > 0.0 && plan.rate < 1.0))
    throw std::invalid_argument("ampute: rate must lie in (0, 1)");
  if (plan.mechanism != Mechanism::MCAR && (!(plan.noise_sd_x > 0.0) || !(plan.noise_sd_y > 0.0)))
    throw std::invalid_argument("ampute: noise SDs must be positive for MAR/MNAR");

  const Index C = d.n_countries(), T = d.n_years();
  SplitDataset out;
  out.x_started = !d.x_mask;
  out.y_started = !d.y_mask;
  out.x_test = BoolGrid::Constant(C, T, false);
  out.y_test = BoolGrid::Constant(C, T, false);
  out.x_truth = d.x_values;
  out.y_truth = d.y_values;

  // Independent streams for the two variables.
  RngStream rng_x(plan.seed, 0xA17);
  RngStream rng_y(plan.seed, 0xB29);
  ampute_variable(d.x_values, d.x_mask, plan.mechanism, plan.rate, plan.noise_sd_x, rng_x,
                  out.x_test);
  ampute_variable(d.y_values, d.y_mask, plan.mechanism, plan.rate, plan.noise_sd_y, rng_y,
                  out.y_test);

  out.training = d;
  for (Index c = 0; c < C; ++c)
    for (Index t = 0; t < T; ++t) {
      if (out.x_test(c, t)) out.training.x_mask(c, t) = false;
      if (out.y_test(c, t)) out.training.y_mask(c, t) = false;
    }
  // Bounds are re-derived from the training mask only. A high rate can
  // strip a country's last X observation; the sampler entry point rejects
  // such training sets, the split itself stays well-defined.
  attach_bounds(out.training, d.bounds);
  return out;
}

void write_test_manifest(const SplitDataset& split, const std::string& path,
                         const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  out << "variable,country,year,true_value\n";
  out.precision(12);
  const PanelDataset& d = split.training;
  for (Index c = 0; c < d.n_countries(); ++c)
    for (Index t = 0; t < d.n_years(); ++t) {
      if (split.x_test(c, t))
        out << "x," << d.country_ids[c] << ',' << d.year_of(t) << ','
            << split.x_truth(c, t) << '\n';
      if (split.y_test(c, t))
        out << "y," << d.country_ids[c] << ',' << d.year_of(t) << ','
            << split.y_truth(c, t) << '\n';
    }
}

} // namespace mints
