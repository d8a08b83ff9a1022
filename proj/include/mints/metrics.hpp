#ifndef MINTS_METRICS_HPP
#define MINTS_METRICS_HPP

#include "mints/types.hpp"

namespace mints {

struct ScoreReport {
  double mae = 0.0;
  double coverage = 0.0;
  double mean_width = 0.0;
  double interval_score = 0.0;
  Index n = 0;
};

// MAE of the medians, coverage and mean width of the [low, up] intervals,
// and the negatively-oriented 95% interval score. The default score uses
// pure miss indicators with weight 2/0.05 = 40; distance_weighted switches
// to the exceedance-weighted variant.
ScoreReport score_predictions(const Vector& truths, const Vector& medians, const Vector& lows,
                              const Vector& ups, bool distance_weighted = false);

} // namespace mints

#endif
