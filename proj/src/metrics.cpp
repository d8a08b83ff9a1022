#include "mints/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace mints {

ScoreReport score_predictions(const Vector& truths, const Vector& medians, const Vector& lows,
                              const Vector& ups, bool distance_weighted) {
  const Index n = truths.size();
  if (medians.size() != n || lows.size() != n || ups.size() != n)
    throw std::invalid_argument("score_predictions: length mismatch");
  if (n == 0) throw std::invalid_argument("score_predictions: empty input");
  if ((lows.array() > ups.array()).any())
    throw std::invalid_argument("score_predictions: requires low <= up");

  constexpr double penalty = 2.0 / 0.05;
  ScoreReport r;
  r.n = n;
  double covered = 0.0;
  for (Index i = 0; i < n; ++i) {
    r.mae += std::abs(truths(i) - medians(i));
    const double width = ups(i) - lows(i);
    r.mean_width += width;
    double is = width;
    if (truths(i) < lows(i))
      is += penalty * (distance_weighted ? lows(i) - truths(i) : 1.0);
    else if (truths(i) > ups(i))
      is += penalty * (distance_weighted ? truths(i) - ups(i) : 1.0);
    else
      covered += 1.0;
    r.interval_score += is;
  }
  const double dn = static_cast<double>(n);
  r.mae /= dn;
  r.mean_width /= dn;
  r.interval_score /= dn;
  r.coverage = covered / dn;
  return r;
}

} // namespace mints
