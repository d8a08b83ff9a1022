#include "mints/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

namespace mints {

namespace {

constexpr double kJitterSd = 0.5;
constexpr double kDegenerateSlack = 1e-9;

double lagged_x(const ChainState& s, Index c, Index t) {
  return t == 0 ? s.x0(c) : s.x_grid(c, t - 1);
}
double lagged_y(const ChainState& s, Index c, Index t) {
  return t == 0 ? s.y0(c) : s.y_grid(c, t - 1);
}

// Within-country linear interpolation between observed values, constant
// extrapolation beyond the first/last observation.
Vector interpolate_series(const Matrix& values, const BoolGrid& mask, Index c) {
  const Index T = values.cols();
  Vector out(T);
  std::vector<Index> obs;
  for (Index t = 0; t < T; ++t)
    if (mask(c, t)) obs.push_back(t);
  for (Index t = 0; t < T; ++t) {
    if (mask(c, t)) {
      out(t) = values(c, t);
      continue;
    }
    auto it = std::lower_bound(obs.begin(), obs.end(), t);
    if (it == obs.begin())
      out(t) = values(c, obs.front());
    else if (it == obs.end())
      out(t) = values(c, obs.back());
    else {
      const Index hi = *it, lo = *(it - 1);
      const double w = static_cast<double>(t - lo) / static_cast<double>(hi - lo);
      out(t) = (1.0 - w) * values(c, lo) + w * values(c, hi);
    }
  }
  return out;
}

double clip(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

double draw_or_clamp(const TruncNormalCond& cond, RngStream& rng, long& degeneracy) {
  if (cond.low < cond.up) return sample_trunc_normal(cond.mean, cond.var, cond.low, cond.up, rng);
  ++degeneracy;
  return cond.low + kDegenerateSlack;
}

} // namespace

void RunConfig::check() const {
  if (n_chains < 1) throw std::invalid_argument("run config: n_chains must be >= 1");
  if (n_thin < 1 || n_imputation_iters < 1)
    throw std::invalid_argument("run config: imputation iterations and thinning must be >= 1");
  if (n_imputation_iters % n_thin != 0)
    throw std::invalid_argument("run config: n_imputation_iters must be a multiple of n_thin");
  const int harvests = n_imputation_iters / n_thin;
  if (m_imputations != n_chains * harvests)
    throw std::invalid_argument("run config: M must equal n_chains * (n_imputation_iters / n_thin); got M=" +
                                std::to_string(m_imputations) + " vs " +
                                std::to_string(n_chains * harvests));
  if (estimation_block < 1 || max_estimation_iters < estimation_block)
    throw std::invalid_argument("run config: bad estimation block settings");
  if (!(psrf_threshold > 1.0)) throw std::invalid_argument("run config: psrf threshold must exceed 1");
}

// ---------------------------------------------------------------------------
// Full conditionals

InvGammaCond cond_sigma_y2(const ChainState& s, const SamplerContext& ctx) {
  const Index C = s.y_grid.rows(), T = s.y_grid.cols();
  double ss = 0.0;
  for (Index c = 0; c < C; ++c)
    for (Index t = 0; t < T; ++t) {
      const double r = s.y_grid(c, t) - s.rho * lagged_y(s, c, t) - s.alpha(c) -
                       s.beta * s.f_x(c, t);
      ss += r * r / s.h_x(c, t);
    }
  return {2.0 + 0.5 * static_cast<double>(C * T), ctx.cp.delta_Y + 0.5 * ss};
}

InvGammaCond cond_sigma_x2(const ChainState& s, const SamplerContext& ctx) {
  const Index C = s.x_grid.rows(), T = s.x_grid.cols();
  double ss = 0.0;
  for (Index c = 0; c < C; ++c)
    for (Index t = 0; t < T; ++t) {
      const double r = s.x_grid(c, t) - lagged_x(s, c, t) - s.gamma(c);
      ss += r * r;
    }
  return {2.0 + 0.5 * static_cast<double>(C * T), ctx.cp.delta_X + 0.5 * ss};
}

NormalCond cond_mu_drift(const ChainState& s, const SamplerContext& ctx) {
  const double C = static_cast<double>(s.gamma.size());
  const double prec = 1.0 / (ctx.cp.zeta_drift * ctx.cp.zeta_drift) + C / s.sigma_drift2;
  const double num = ctx.cp.nu_drift / (ctx.cp.zeta_drift * ctx.cp.zeta_drift) +
                     s.gamma.sum() / s.sigma_drift2;
  return {num / prec, 1.0 / prec};
}

InvGammaCond cond_sigma_drift2(const ChainState& s, const SamplerContext& ctx) {
  const double C = static_cast<double>(s.gamma.size());
  const double ss = (s.gamma.array() - s.mu_drift).square().sum();
  return {2.0 + 0.5 * C, ctx.cp.delta_drift + 0.5 * ss};
}

NormalCond cond_gamma(const ChainState& s, const SamplerContext& ctx, Index c) {
  (void)ctx;
  const Index T = s.x_grid.cols();
  const double prec = 1.0 / s.sigma_drift2 + static_cast<double>(T) / s.sigma_X2;
  double diff_sum = 0.0;
  for (Index t = 0; t < T; ++t) diff_sum += s.x_grid(c, t) - lagged_x(s, c, t);
  const double num = s.mu_drift / s.sigma_drift2 + diff_sum / s.sigma_X2;
  return {num / prec, 1.0 / prec};
}

NormalCond cond_mu0(const ChainState& s, const SamplerContext& ctx) {
  const double C = static_cast<double>(s.alpha.size());
  const double prec = 1.0 / (ctx.cp.zeta_0 * ctx.cp.zeta_0) + C / s.sigma_0_2;
  const double num =
      ctx.cp.nu_0 / (ctx.cp.zeta_0 * ctx.cp.zeta_0) + s.alpha.sum() / s.sigma_0_2;
  return {num / prec, 1.0 / prec};
}

InvGammaCond cond_sigma02(const ChainState& s, const SamplerContext& ctx) {
  const double C = static_cast<double>(s.alpha.size());
  const double ss = (s.alpha.array() - s.mu_0).square().sum();
  return {2.0 + 0.5 * C, ctx.cp.delta_0 + 0.5 * ss};
}

NormalCond cond_alpha(const ChainState& s, const SamplerContext& ctx, Index c) {
  (void)ctx;
  const Index T = s.y_grid.cols();
  double prec = 1.0 / s.sigma_0_2;
  double num = s.mu_0 / s.sigma_0_2;
  for (Index t = 0; t < T; ++t) {
    const double w = 1.0 / (s.sigma_Y2 * s.h_x(c, t));
    prec += w;
    num += (s.y_grid(c, t) - s.rho * lagged_y(s, c, t) - s.beta * s.f_x(c, t)) * w;
  }
  return {num / prec, 1.0 / prec};
}

TruncNormalCond cond_x_terminal(const ChainState& s, const SamplerContext& ctx, Index c) {
  const Index T = s.x_grid.cols();
  TruncNormalCond cond;
  cond.mean = lagged_x(s, c, T - 1) + s.gamma(c);
  cond.var = s.sigma_X2;
  cond.low = ctx.data.bounds.x_low;
  cond.up = ctx.data.bounds.x_up;
  // Keep the Y truncation window satisfiable where Y is observed.
  if (ctx.data.y_mask(c, T - 1)) cond.low = std::max(cond.low, ctx.data.y_values(c, T - 1));
  return cond;
}

TruncNormalCond cond_x_interior(const ChainState& s, const SamplerContext& ctx, Index c, Index t) {
  TruncNormalCond cond;
  cond.mean = 0.5 * (s.x_grid(c, t + 1) + lagged_x(s, c, t));
  cond.var = 0.5 * s.sigma_X2;
  cond.low = ctx.data.bounds.x_low;
  cond.up = ctx.data.bounds.x_up;
  if (ctx.data.y_mask(c, t)) cond.low = std::max(cond.low, ctx.data.y_values(c, t));
  return cond;
}

TruncNormalCond cond_x0(const ChainState& s, const SamplerContext& ctx, Index c) {
  const double var_early = ctx.cp.sigma_early(1, 1);
  const double prec = 1.0 / s.sigma_X2 + 1.0 / var_early;
  const double num = (s.x_grid(c, 0) - s.gamma(c)) / s.sigma_X2 +
                     ctx.cp.mu_early(1) / var_early;
  TruncNormalCond cond;
  cond.mean = num / prec;
  cond.var = 1.0 / prec;
  cond.low = ctx.data.bounds.x_low;
  cond.up = ctx.data.bounds.x0_up(c);
  return cond;
}

TruncNormalCond cond_y_terminal(const ChainState& s, const SamplerContext& ctx, Index c) {
  const Index T = s.y_grid.cols();
  TruncNormalCond cond;
  cond.mean = s.alpha(c) + s.rho * lagged_y(s, c, T - 1) + s.beta * s.f_x(c, T - 1);
  cond.var = s.sigma_Y2 * s.h_x(c, T - 1);
  cond.low = ctx.data.bounds.y_low;
  cond.up = ctx.data.bounds.y_up(s.x_grid(c, T - 1));
  return cond;
}

TruncNormalCond cond_y_interior(const ChainState& s, const SamplerContext& ctx, Index c, Index t) {
  const double w_next = 1.0 / (s.sigma_Y2 * s.h_x(c, t + 1));
  const double w_here = 1.0 / (s.sigma_Y2 * s.h_x(c, t));
  const double prec = s.rho * s.rho * w_next + w_here;
  const double num =
      s.rho * (s.y_grid(c, t + 1) - s.alpha(c) - s.beta * s.f_x(c, t + 1)) * w_next +
      (s.rho * lagged_y(s, c, t) + s.alpha(c) + s.beta * s.f_x(c, t)) * w_here;
  TruncNormalCond cond;
  cond.mean = num / prec;
  cond.var = 1.0 / prec;
  cond.low = ctx.data.bounds.y_low;
  cond.up = ctx.data.bounds.y_up(s.x_grid(c, t));
  return cond;
}

TruncNormalCond cond_y0(const ChainState& s, const SamplerContext& ctx, Index c) {
  const double r = ctx.cp.r_early;
  const double sy = ctx.cp.sd_y_early(), sx = ctx.cp.sd_x_early();
  const double cond_var_early = (1.0 - r * r) * sy * sy;
  const double w1 = s.rho * s.rho / (s.sigma_Y2 * s.h_x(c, 0));
  const double prec = w1 + 1.0 / cond_var_early;
  const double early_mean = ctx.cp.mu_early(0) + r * sy / sx * (s.x0(c) - ctx.cp.mu_early(1));
  const double num = s.rho * (s.y_grid(c, 0) - s.alpha(c) - s.beta * s.f_x(c, 0)) /
                         (s.sigma_Y2 * s.h_x(c, 0)) +
                     early_mean / cond_var_early;
  TruncNormalCond cond;
  cond.mean = num / prec;
  cond.var = 1.0 / prec;
  cond.low = ctx.data.bounds.y_low;
  cond.up = ctx.data.bounds.y0_up(c);
  return cond;
}

double y_model_sum_squares(const ChainState& s, const SamplerContext& ctx, double beta,
                           double rho) {
  (void)ctx;
  const Index C = s.y_grid.rows(), T = s.y_grid.cols();
  double ss = 0.0;
  for (Index c = 0; c < C; ++c)
    for (Index t = 0; t < T; ++t) {
      const double r =
          s.y_grid(c, t) - s.alpha(c) - beta * s.f_x(c, t) - rho * lagged_y(s, c, t);
      ss += r * r / (2.0 * s.sigma_Y2 * s.h_x(c, t));
    }
  return ss;
}

// ---------------------------------------------------------------------------
// Initialization

ChainState initialize_chain(const SamplerContext& ctx, RngStream& rng) {
  const PanelDataset& d = ctx.data;
  const ControlParams& cp = ctx.cp;
  const Index C = d.n_countries(), T = d.n_years();

  ChainState s;
  s.x_grid = d.x_values;
  s.y_grid = d.y_values;

  // Deterministic starting surfaces.
  for (Index c = 0; c < C; ++c) {
    const Vector x_line = interpolate_series(d.x_values, d.x_mask, c);
    bool any_y = false;
    for (Index t = 0; t < T; ++t) any_y = any_y || d.y_mask(c, t);
    Vector y_line;
    if (any_y) y_line = interpolate_series(d.y_values, d.y_mask, c);

    for (Index t = 0; t < T; ++t) {
      if (!d.x_mask(c, t)) s.x_grid(c, t) = x_line(t);
      if (!d.y_mask(c, t)) {
        if (d.x_mask(c, t))
          s.y_grid(c, t) = evaluate(ctx.splines.f, d.x_values(c, t));
        else if (any_y)
          s.y_grid(c, t) = y_line(t);
        else
          s.y_grid(c, t) = evaluate(ctx.splines.f, x_line(t));
      }
    }
  }

  // Per-chain jitter on the missing cells, clipped into the bounds.
  for (Index c = 0; c < C; ++c)
    for (Index t = 0; t < T; ++t) {
      if (!d.x_mask(c, t)) {
        double lo = d.bounds.x_low;
        if (d.y_mask(c, t)) lo = std::max(lo, d.y_values(c, t));
        s.x_grid(c, t) = clip(s.x_grid(c, t) + kJitterSd * rng.normal(), lo, d.bounds.x_up);
      }
      if (!d.y_mask(c, t)) {
        const double up = d.bounds.y_up(s.x_grid(c, t));
        double y = s.y_grid(c, t) + kJitterSd * rng.normal();
        if (d.bounds.y_low < up)
          y = clip(y, d.bounds.y_low, up);
        else
          y = d.bounds.y_low;
        s.y_grid(c, t) = y;
      }
    }

  // Parameters from diffuse versions of the priors (normal variances
  // inflated x10; the inverse-gamma priors are already heavy-tailed).
  s.sigma_X2 = sample_inverse_gamma(2.0, cp.delta_X, rng);
  s.sigma_drift2 = sample_inverse_gamma(2.0, cp.delta_drift, rng);
  s.mu_drift = rng.normal(cp.nu_drift, 10.0 * cp.zeta_drift * cp.zeta_drift);
  s.gamma.resize(C);
  for (Index c = 0; c < C; ++c) s.gamma(c) = rng.normal(s.mu_drift, s.sigma_drift2);

  s.sigma_Y2 = sample_inverse_gamma(2.0, cp.delta_Y, rng);
  s.sigma_0_2 = sample_inverse_gamma(2.0, cp.delta_0, rng);
  s.mu_0 = rng.normal(cp.nu_0, 10.0 * cp.zeta_0 * cp.zeta_0);
  s.alpha.resize(C);
  for (Index c = 0; c < C; ++c) s.alpha(c) = rng.normal(s.mu_0, s.sigma_0_2);

  s.beta = rng.normal(0.0, 10.0);
  s.rho = rng.uniform();

  s.x0.resize(C);
  s.y0.resize(C);
  for (Index c = 0; c < C; ++c) {
    Box2 box;
    box.low1 = d.bounds.y_low;
    box.up1 = d.bounds.y0_up(c);
    box.low2 = d.bounds.x_low;
    box.up2 = d.bounds.x0_up(c);
    if (!(box.low1 < box.up1)) box.up1 = box.low1 + 1e-6;
    if (!(box.low2 < box.up2)) box.up2 = box.low2 + 1e-6;
    const Vector2 draw =
        sample_trunc_bivariate_normal(cp.mu_early, 10.0 * cp.sigma_early, box, rng);
    s.y0(c) = draw(0);
    s.x0(c) = draw(1);
  }

  s.f_x.resize(C, T);
  s.h_x.resize(C, T);
  for (Index c = 0; c < C; ++c)
    for (Index t = 0; t < T; ++t) {
      s.f_x(c, t) = evaluate(ctx.splines.f, s.x_grid(c, t));
      s.h_x(c, t) = evaluate(ctx.splines.h, s.x_grid(c, t));
    }
  return s;
}

// ---------------------------------------------------------------------------
// Sweep steps

void step_sigma_y2(ChainState& s, const SamplerContext& ctx, RngStream& rng) {
  const InvGammaCond c = cond_sigma_y2(s, ctx);
  s.sigma_Y2 = sample_inverse_gamma(c.shape, c.rate, rng);
}

void step_sigma_x2(ChainState& s, const SamplerContext& ctx, RngStream& rng) {
  const InvGammaCond c = cond_sigma_x2(s, ctx);
  s.sigma_X2 = sample_inverse_gamma(c.shape, c.rate, rng);
}

void step_variances(ChainState& s, const SamplerContext& ctx, RngStream& rng) {
  step_sigma_y2(s, ctx, rng);
  step_sigma_x2(s, ctx, rng);
}

bool step_beta_rho(ChainState& s, const SamplerContext& ctx, const ProposalTuning& tuning,
                   RngStream& rng) {
  const Matrix2 cov = tuning.phi * tuning.base_cov;
  Box2 box;
  box.low2 = 0.0;
  box.up2 = 1.0;
  const Vector2 current(s.beta, s.rho);
  const Vector2 prop = sample_trunc_bivariate_normal(current, cov, box, rng);

  double log_ratio = y_model_sum_squares(s, ctx, s.beta, s.rho) -
                     y_model_sum_squares(s, ctx, prop(0), prop(1));
  // beta ~ N(0, 1) prior; rho's U(0,1) prior is flat inside the box.
  log_ratio += 0.5 * (s.beta * s.beta - prop(0) * prop(0));
  // Proposal asymmetry from the rho-truncation of the proposal: the
  // normalization depends only on the rho marginal of the center.
  const double z_old = normal_interval_prob(s.rho, cov(1, 1), 0.0, 1.0);
  const double z_new = normal_interval_prob(prop(1), cov(1, 1), 0.0, 1.0);
  log_ratio += std::log(z_old) - std::log(z_new);

  ++s.mh_proposals;
  if (std::log(rng.uniform()) < log_ratio) {
    s.beta = prop(0);
    s.rho = prop(1);
    ++s.mh_accepts;
    return true;
  }
  return false;
}

void step_drift(ChainState& s, const SamplerContext& ctx, RngStream& rng) {
  const NormalCond mu = cond_mu_drift(s, ctx);
  s.mu_drift = rng.normal(mu.mean, mu.var);
  const InvGammaCond sd = cond_sigma_drift2(s, ctx);
  s.sigma_drift2 = sample_inverse_gamma(sd.shape, sd.rate, rng);
  for (Index c = 0; c < s.gamma.size(); ++c) {
    const NormalCond g = cond_gamma(s, ctx, c);
    s.gamma(c) = rng.normal(g.mean, g.var);
  }
}

void step_intercepts(ChainState& s, const SamplerContext& ctx, RngStream& rng) {
  const NormalCond mu = cond_mu0(s, ctx);
  s.mu_0 = rng.normal(mu.mean, mu.var);
  const InvGammaCond sd = cond_sigma02(s, ctx);
  s.sigma_0_2 = sample_inverse_gamma(sd.shape, sd.rate, rng);
  for (Index c = 0; c < s.alpha.size(); ++c) {
    const NormalCond a = cond_alpha(s, ctx, c);
    s.alpha(c) = rng.normal(a.mean, a.var);
  }
}

void impute_x_sweep(ChainState& s, const SamplerContext& ctx, RngStream& rng) {
  const PanelDataset& d = ctx.data;
  const Index C = d.n_countries(), T = d.n_years();
  for (Index c = 0; c < C; ++c) {
    for (Index t = T - 1; t >= 0; --t) {
      if (d.x_mask(c, t)) continue;
      const TruncNormalCond cond = (t == T - 1) ? cond_x_terminal(s, ctx, c)
                                                : cond_x_interior(s, ctx, c, t);
      const double x = draw_or_clamp(cond, rng, s.degenerate_x_windows);
      s.x_grid(c, t) = x;
      s.f_x(c, t) = evaluate(ctx.splines.f, x);
      s.h_x(c, t) = evaluate(ctx.splines.h, x);
    }
    const TruncNormalCond cond0 = cond_x0(s, ctx, c);
    s.x0(c) = draw_or_clamp(cond0, rng, s.degenerate_x_windows);
  }
}

void impute_y_sweep(ChainState& s, const SamplerContext& ctx, RngStream& rng) {
  const PanelDataset& d = ctx.data;
  const Index C = d.n_countries(), T = d.n_years();
  for (Index c = 0; c < C; ++c) {
    for (Index t = T - 1; t >= 0; --t) {
      if (d.y_mask(c, t)) continue;
      const TruncNormalCond cond = (t == T - 1) ? cond_y_terminal(s, ctx, c)
                                                : cond_y_interior(s, ctx, c, t);
      s.y_grid(c, t) = draw_or_clamp(cond, rng, s.degenerate_y_windows);
    }
    const TruncNormalCond cond0 = cond_y0(s, ctx, c);
    s.y0(c) = draw_or_clamp(cond0, rng, s.degenerate_y_windows);
  }
}

void gibbs_sweep(ChainState& s, const SamplerContext& ctx, const ProposalTuning& tuning,
                 RngStream& rng) {
  step_sigma_y2(s, ctx, rng);
  step_beta_rho(s, ctx, tuning, rng);
  step_sigma_x2(s, ctx, rng);
  step_drift(s, ctx, rng);
  step_intercepts(s, ctx, rng);
  impute_x_sweep(s, ctx, rng);
  impute_y_sweep(s, ctx, rng);
  ++s.iteration;
}

// ---------------------------------------------------------------------------
// Tuning and diagnostics

PilotResult tune_phi(const SamplerContext& ctx, RngStream& rng, int pilot_iters,
                     ProposalTuning start) {
  if (pilot_iters < 500) throw std::invalid_argument("tune_phi: pilot needs >= 500 iterations");
  PilotResult out;
  out.tuning = start;
  ChainState s = initialize_chain(ctx, rng);
  double log_phi = std::log(start.phi);
  int tail_accepts = 0, tail_count = 0;
  for (int i = 1; i <= pilot_iters; ++i) {
    out.tuning.phi = std::exp(log_phi);
    const long before = s.mh_accepts;
    gibbs_sweep(s, ctx, out.tuning, rng);
    const double acc = static_cast<double>(s.mh_accepts - before);
    log_phi += (acc - out.tuning.acceptance_target) / std::sqrt(static_cast<double>(i));
    if (2 * i > pilot_iters) {
      tail_accepts += static_cast<int>(acc);
      ++tail_count;
    }
  }
  out.tuning.phi = std::exp(log_phi);
  out.final_acceptance = tail_count > 0 ? static_cast<double>(tail_accepts) / tail_count : 0.0;
  out.converged = out.final_acceptance >= 0.25 && out.final_acceptance <= 0.55;
  return out;
}

double split_rhat(const std::vector<std::vector<double>>& chains) {
  if (chains.size() < 2) throw std::invalid_argument("split_rhat: need at least 2 chains");
  const std::size_t len = chains.front().size();
  for (const auto& c : chains)
    if (c.size() != len) throw std::invalid_argument("split_rhat: unequal chain lengths");
  if (len < 10) throw std::invalid_argument("split_rhat: traces must have length >= 10");

  const std::size_t half = len / 2;
  std::vector<double> means, vars;
  for (const auto& c : chains) {
    for (int part = 0; part < 2; ++part) {
      const std::size_t begin = part == 0 ? 0 : len - half;
      double m = 0.0;
      for (std::size_t i = begin; i < begin + half; ++i) m += c[i];
      m /= static_cast<double>(half);
      double v = 0.0;
      for (std::size_t i = begin; i < begin + half; ++i) v += (c[i] - m) * (c[i] - m);
      v /= static_cast<double>(half - 1);
      means.push_back(m);
      vars.push_back(v);
    }
  }
  const double m_chains = static_cast<double>(means.size());
  const double n = static_cast<double>(half);
  double grand = 0.0;
  for (double m : means) grand += m;
  grand /= m_chains;
  double b = 0.0;
  for (double m : means) b += (m - grand) * (m - grand);
  b *= n / (m_chains - 1.0);
  double w = 0.0;
  for (double v : vars) w += v;
  w /= m_chains;
  if (!(w > 0.0)) return b > 0.0 ? kInf : 1.0;
  const double var_plus = (n - 1.0) / n * w + b / n;
  return std::sqrt(var_plus / w);
}

// ---------------------------------------------------------------------------
// Phases

namespace {

void parallel_over_chains(int n_chains, int jobs, const std::function<void(int)>& work) {
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  int workers = jobs > 0 ? jobs : (hw > 0 ? hw : 1);
  workers = std::min(workers, n_chains);
  if (workers <= 1) {
    for (int k = 0; k < n_chains; ++k) work(k);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int widx = 0; widx < workers; ++widx)
    pool.emplace_back([&]() {
      for (;;) {
        const int k = next.fetch_add(1);
        if (k >= n_chains) return;
        work(k);
      }
    });
  for (auto& th : pool) th.join();
}

struct Monitors {
  std::vector<std::string> names;
  std::vector<CellRef> cells;

  double read(const ChainState& s, std::size_t idx) const {
    switch (idx) {
      case 0: return s.beta;
      case 1: return s.rho;
      case 2: return s.sigma_X2;
      case 3: return s.sigma_Y2;
      case 4: return s.mu_drift;
      case 5: return s.mu_0;
      default: {
        const CellRef& ref = cells[idx - 6];
        return ref.variable == 0 ? s.x_grid(ref.c, ref.t) : s.y_grid(ref.c, ref.t);
      }
    }
  }
};

Monitors pick_monitors(const PanelDataset& d, int n_cells, RngStream& rng) {
  Monitors m;
  m.names = {"beta", "rho", "sigma_X2", "sigma_Y2", "mu_drift", "mu_0"};
  std::vector<CellRef> missing;
  for (Index c = 0; c < d.n_countries(); ++c)
    for (Index t = 0; t < d.n_years(); ++t) {
      if (!d.x_mask(c, t)) missing.push_back({0, c, t});
      if (!d.y_mask(c, t)) missing.push_back({1, c, t});
    }
  // Deterministic partial Fisher-Yates pick.
  const int take = std::min<int>(n_cells, static_cast<int>(missing.size()));
  for (int i = 0; i < take; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(rng.uniform() * static_cast<double>(missing.size() - i));
    std::swap(missing[i], missing[std::min(j, missing.size() - 1)]);
    const CellRef& ref = missing[i];
    m.cells.push_back(ref);
    m.names.push_back((ref.variable == 0 ? std::string("x[") : std::string("y[")) +
                      std::to_string(ref.c) + "," + std::to_string(ref.t) + "]");
  }
  return m;
}

} // namespace

ImputationResult run_imputation(std::vector<ChainState>& chains, const SamplerContext& ctx,
                                const ProposalTuning& tuning, const RunConfig& config,
                                std::vector<RngStream>& rngs,
                                const std::vector<CellRef>& predictive_cells, bool pool_all) {
  config.check();
  if (static_cast<int>(chains.size()) != config.n_chains ||
      rngs.size() != chains.size())
    throw std::invalid_argument("run_imputation: chain/rng count must match config");

  const int harvests = config.n_imputation_iters / config.n_thin;
  ImputationResult out;
  out.completed.resize(static_cast<std::size_t>(config.n_chains) * harvests);

  std::vector<std::vector<std::vector<double>>> pools(chains.size());
  // Per-chain traces of harvested cells for the autocorrelation report.
  std::vector<std::vector<std::vector<double>>> harvest_traces(chains.size());

  parallel_over_chains(config.n_chains, config.jobs, [&](int k) {
    ChainState& s = chains[k];
    RngStream& rng = rngs[k];
    auto& pool = pools[k];
    pool.assign(predictive_cells.size(), {});
    auto& traces = harvest_traces[k];
    traces.assign(predictive_cells.size(), {});
    int harvested = 0;
    for (int i = 1; i <= config.n_imputation_iters; ++i) {
      gibbs_sweep(s, ctx, tuning, rng);
      if (pool_all) {
        for (std::size_t p = 0; p < predictive_cells.size(); ++p) {
          const CellRef& ref = predictive_cells[p];
          pool[p].push_back(ref.variable == 0 ? s.x_grid(ref.c, ref.t)
                                              : s.y_grid(ref.c, ref.t));
        }
      }
      if (i % config.n_thin == 0) {
        CompletedDataset cd;
        cd.chain = k;
        cd.iteration = s.iteration;
        cd.x = s.x_grid;
        cd.y = s.y_grid;
        out.completed[static_cast<std::size_t>(k) * harvests + harvested] = std::move(cd);
        ++harvested;
        for (std::size_t p = 0; p < predictive_cells.size(); ++p) {
          const CellRef& ref = predictive_cells[p];
          const double v =
              ref.variable == 0 ? s.x_grid(ref.c, ref.t) : s.y_grid(ref.c, ref.t);
          traces[p].push_back(v);
          if (!pool_all) pool[p].push_back(v);
        }
      }
    }
  });

  out.predictive_draws.assign(predictive_cells.size(), {});
  for (std::size_t k = 0; k < chains.size(); ++k)
    for (std::size_t p = 0; p < predictive_cells.size(); ++p)
      out.predictive_draws[p].insert(out.predictive_draws[p].end(), pools[k][p].begin(),
                                     pools[k][p].end());

  // Mean lag-1 autocorrelation of the harvested values across cells/chains.
  double acf_sum = 0.0;
  int acf_count = 0;
  for (const auto& per_chain : harvest_traces)
    for (const auto& tr : per_chain) {
      const std::size_t n = tr.size();
      if (n < 3) continue;
      double m = 0.0;
      for (double v : tr) m += v;
      m /= static_cast<double>(n);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        den += (tr[i] - m) * (tr[i] - m);
        if (i + 1 < n) num += (tr[i] - m) * (tr[i + 1] - m);
      }
      if (den > 0.0) {
        acf_sum += num / den;
        ++acf_count;
      }
    }
  out.lag1_autocorr = acf_count > 0 ? acf_sum / acf_count : 0.0;
  return out;
}

MintsRun run_mints(const PanelDataset& d, const MintsOptions& opt) {
  opt.run.check();
  validate(d);
  MintsRun out;

  const CompleteCases cc = complete_cases(d);
  out.splines = estimate_f_h(cc.x, cc.y, d.bounds.y_low, d.bounds.y_cap, opt.spline_eps,
                             opt.spline);
  out.cp = compute_control_params(d, opt.early_window);
  const SamplerContext ctx{d, out.splines, out.cp};

  // Pilot chain gets a stream id past the sampling chains.
  RngStream pilot_rng(opt.seed, static_cast<std::uint64_t>(opt.run.n_chains) + 1,
                      opt.replication);
  const PilotResult pilot = tune_phi(ctx, pilot_rng, opt.run.pilot_iters);
  out.tuning = pilot.tuning;
  out.pilot_acceptance = pilot.final_acceptance;

  RngStream monitor_rng(opt.seed, static_cast<std::uint64_t>(opt.run.n_chains) + 2,
                        opt.replication);
  const Monitors monitors = pick_monitors(d, opt.run.n_monitor_cells, monitor_rng);

  std::vector<ChainState> chains;
  std::vector<RngStream> rngs;
  for (int k = 0; k < opt.run.n_chains; ++k) {
    rngs.emplace_back(opt.seed, static_cast<std::uint64_t>(k), opt.replication);
    chains.push_back(initialize_chain(ctx, rngs.back()));
  }

  // Estimation phase: blocks of sweeps, split-Rhat gate on the most recent
  // half of every monitored trace.
  const std::size_t n_monitors = monitors.names.size();
  std::vector<std::vector<std::vector<double>>> traces(
      chains.size(), std::vector<std::vector<double>>(n_monitors));
  int iters = 0;
  out.convergence.monitor_names = monitors.names;
  while (iters < opt.run.max_estimation_iters) {
    const int block = std::min(opt.run.estimation_block, opt.run.max_estimation_iters - iters);
    parallel_over_chains(opt.run.n_chains, opt.run.jobs, [&](int k) {
      for (int i = 0; i < block; ++i) {
        gibbs_sweep(chains[k], ctx, out.tuning, rngs[k]);
        for (std::size_t mi = 0; mi < n_monitors; ++mi)
          traces[k][mi].push_back(monitors.read(chains[k], mi));
      }
    });
    iters += block;

    out.convergence.psrf.assign(n_monitors, kInf);
    double worst = 0.0;
    const std::size_t keep = traces[0][0].size() / 2;
    if (keep >= 10 && chains.size() >= 2) {
      for (std::size_t mi = 0; mi < n_monitors; ++mi) {
        std::vector<std::vector<double>> per_chain;
        for (std::size_t k = 0; k < chains.size(); ++k)
          per_chain.emplace_back(traces[k][mi].end() - keep, traces[k][mi].end());
        out.convergence.psrf[mi] = split_rhat(per_chain);
        worst = std::max(worst, out.convergence.psrf[mi]);
      }
      out.convergence.max_psrf = worst;
      if (worst < opt.run.psrf_threshold) {
        out.convergence.converged = true;
        break;
      }
    } else if (chains.size() < 2) {
      // Single chain: no cross-chain diagnostic; run the configured cap.
      out.convergence.converged = true;
    }
  }
  out.convergence.iterations = iters;

  long acc = 0, prop = 0;
  for (const auto& s : chains) {
    acc += s.mh_accepts;
    prop += s.mh_proposals;
  }
  out.estimation_acceptance = prop > 0 ? static_cast<double>(acc) / prop : 0.0;

  std::vector<CellRef> cells = opt.predictive_cells;
  ImputationResult imp =
      run_imputation(chains, ctx, out.tuning, opt.run, rngs, cells, opt.pool_all);
  out.completed = std::move(imp.completed);
  out.predictive_draws = std::move(imp.predictive_draws);
  out.lag1_autocorr = imp.lag1_autocorr;
  for (const auto& s : chains) {
    out.degenerate_y_windows += s.degenerate_y_windows;
    out.degenerate_x_windows += s.degenerate_x_windows;
  }
  return out;
}

} // namespace mints
