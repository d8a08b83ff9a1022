#ifndef MINTS_AMPUTATION_HPP
#define MINTS_AMPUTATION_HPP

#include <cstdint>

#include "mints/panel_data.hpp"

namespace mints {

enum class Mechanism { MCAR, MAR, MNAR };

// Simulated-missingness plan, applied independently to X and Y among their
// currently observed cells. MAR scores cells by year with noise (earlier
// years more likely missing); MNAR scores by value (smaller values more
// likely missing); MCAR scores by pure noise. The lowest rate-quantile of
// scores is flagged missing.
struct AmputationPlan {
  Mechanism mechanism = Mechanism::MCAR;
  double rate = 0.1;
  double noise_sd_x = 10.0;
  double noise_sd_y = 10.0;
  std::uint64_t seed = 1;

  // Appendix defaults: simulated data MAR 10 / MNAR 40; enrollment-shaped
  // data MAR 40, MNAR 15 (Y) and 25 (X).
  static AmputationPlan simulated(Mechanism m, double rate, std::uint64_t seed);
  static AmputationPlan enrollment(Mechanism m, double rate, std::uint64_t seed);
};

// Training/test split produced by amputation. The three masks partition the
// grid per variable: started-as-missing, observed (training), and
// simulated-as-missing (test).
struct SplitDataset {
  PanelDataset training;          // masks reflect post-amputation observations
  BoolGrid x_test, y_test;        // simulated-as-missing
  BoolGrid x_started, y_started;  // missing before amputation
  Matrix x_truth, y_truth;        // values at test cells
};

SplitDataset ampute(const PanelDataset& d, const AmputationPlan& plan);

// Test-manifest rows `variable,country,year,true_value` for the split.
void write_test_manifest(const SplitDataset& split, const std::string& path,
                         const std::string& header_comment = "");

} // namespace mints

#endif
