#include "mints/pooling.hpp"

#include <cmath>
#include <stdexcept>

#include "mints/math.hpp"

namespace mints {

PooledEstimate pool(const Vector& q_hats, const Vector& u_hats, double level) {
  const Index m = q_hats.size();
  if (m < 2) throw std::invalid_argument("pool: need at least 2 imputations");
  if (u_hats.size() != m) throw std::invalid_argument("pool: estimate/variance length mismatch");
  if ((u_hats.array() < 0.0).any())
    throw std::invalid_argument("pool: within-imputation variances must be nonnegative");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("pool: level outside (0, 1)");

  PooledEstimate out;
  out.m = static_cast<int>(m);
  out.q_bar = q_hats.mean();
  out.u_bar = u_hats.mean();
  out.b = (q_hats.array() - out.q_bar).square().sum() / static_cast<double>(m - 1);
  const double m_d = static_cast<double>(m);
  out.t_total = out.u_bar + (1.0 + 1.0 / m_d) * out.b;
  out.fmi_exploratory = m < 100;

  const double p = 1.0 - 0.5 * (1.0 - level);
  if (out.b > 0.0 && out.u_bar > 0.0) {
    out.r_m = (1.0 + 1.0 / m_d) * out.b / out.u_bar;
    out.nu = (m_d - 1.0) * (1.0 + 1.0 / out.r_m) * (1.0 + 1.0 / out.r_m);
    out.fmi = (out.r_m + 2.0 / (out.nu + 3.0)) / (out.r_m + 1.0);
    const double tcrit = t_quantile(p, out.nu);
    out.ci_low = out.q_bar - tcrit * std::sqrt(out.t_total);
    out.ci_high = out.q_bar + tcrit * std::sqrt(out.t_total);
  } else if (out.b > 0.0) {
    // No within-imputation variance: all spread is between imputations.
    out.r_m = kInf;
    out.nu = m_d - 1.0;
    out.fmi = 1.0;
    const double tcrit = t_quantile(p, out.nu);
    out.ci_low = out.q_bar - tcrit * std::sqrt(out.t_total);
    out.ci_high = out.q_bar + tcrit * std::sqrt(out.t_total);
  } else {
    // b = 0: the formulas are undefined at r = 0; report the
    // within-imputation normal-limit interval.
    out.zero_between = true;
    out.r_m = 0.0;
    out.nu = kInf;
    out.fmi = 0.0;
    const double zcrit = norm_quantile(p);
    out.ci_low = out.q_bar - zcrit * std::sqrt(out.t_total);
    out.ci_high = out.q_bar + zcrit * std::sqrt(out.t_total);
  }
  return out;
}

} // namespace mints
