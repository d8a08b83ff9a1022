// Acceptance suite: one numbered criterion per run (or all), each printing a
// single pass/fail line. Exit status is nonzero when any checked criterion
// fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mints/amputation.hpp"
#include "mints/analysis.hpp"
#include "mints/harness.hpp"
#include "mints/metrics.hpp"
#include "mints/pooling.hpp"
#include "mints/sampler.hpp"
#include "mints/simgen.hpp"
#include "oracle.hpp"

using namespace mints;

namespace {

std::string g_cli_path;
std::string g_workdir = ".";

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

// ---------------------------------------------------------------------------
// 1. Pooling oracle

bool criterion_pooling(Check& c) {
  const Vector q = (Vector(3) << 1, 2, 3).finished();
  const Vector u = Vector::Constant(3, 0.5);
  const PooledEstimate p = pool(q, u, 0.95);
  c.require(std::abs(p.q_bar - 2.0) < 1e-3, "q_bar");
  c.require(std::abs(p.t_total - 1.8333) < 1e-3, "t_total");
  c.require(std::abs(p.r_m - 2.6667) < 1e-3, "r_m");
  c.require(std::abs(p.nu - 3.7813) < 1e-3, "nu");
  c.require(std::abs(p.fmi - 0.8077) < 1e-3, "fmi");
  return c.ok;
}

// ---------------------------------------------------------------------------
// 2. Interval-score oracle

bool criterion_interval_score(Check& c) {
  const Vector lo = Vector::Constant(1, 0.0), up = Vector::Constant(1, 10.0);
  Vector t = Vector::Constant(1, 5.0);
  c.require(score_predictions(t, t, lo, up).interval_score == 10.0, "inside: IS = 10");
  t(0) = 12.0;
  c.require(score_predictions(t, t, lo, up).interval_score == 50.0, "outside: IS = 50");
  Vector t2(2), m2(2);
  t2 << 5.0, 12.0;
  m2 << 5.0, 9.0;
  const Vector lo2 = Vector::Constant(2, 0.0), up2 = Vector::Constant(2, 10.0);
  c.require(score_predictions(t2, m2, lo2, up2).interval_score == 30.0, "mixed: IS = 30");
  return c.ok;
}

// ---------------------------------------------------------------------------
// 3. Truncated-normal correctness

bool criterion_trunc_normal(Check& c) {
  RngStream rng(81);
  double sum = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) sum += sample_trunc_normal(0.0, 1.0, 0.0, kInf, rng);
  c.require(std::abs(sum / n - 0.79788) < 0.01, "half-line mean");

  RngStream cfg_rng(82);
  long violations = 0;
  for (int rep = 0; rep < 10000; ++rep) {
    const double mu = cfg_rng.uniform(-50.0, 50.0);
    const double var = cfg_rng.uniform(1e-4, 100.0);
    double low = cfg_rng.uniform(-60.0, 60.0);
    double up = low + cfg_rng.uniform(1e-6, 30.0);
    const int kind = static_cast<int>(cfg_rng.uniform() * 4);
    if (kind == 1) low = -kInf;
    if (kind == 2) up = kInf;
    const double x = sample_trunc_normal(mu, var, low, up, rng);
    if (x < low || x > up) ++violations;
  }
  c.require(violations == 0, "support violations");
  return c.ok;
}

// ---------------------------------------------------------------------------
// 4. Frozen-state conditional tests (steps 1, 3, 4, 5, 6, 7, 8, 9)

struct Frozen {
  PanelDataset data;
  SplinePair splines;
  ControlParams cp;
  ChainState state;
};

Frozen make_frozen() {
  Frozen f;
  // Two countries, three years. Country 0 has one missing interior X cell
  // (with Y observed there) and one missing Y cell; country 1 fully
  // observed apart from a missing terminal X and terminal Y.
  f.data.first_year = 1;
  f.data.country_ids = {"A", "B"};
  f.data.x_values = (Matrix(2, 3) << 10.0, 0.0, 14.0, 20.0, 22.0, 0.0).finished();
  f.data.x_mask = (BoolGrid(2, 3) << true, false, true, true, true, false).finished();
  f.data.y_values = (Matrix(2, 3) << 4.0, 4.5, 0.0, 8.0, 9.0, 0.0).finished();
  f.data.y_mask = (BoolGrid(2, 3) << true, true, false, true, true, false).finished();
  BoundsSpec b;
  b.x_low = 0.0;
  b.x_up = 100.0;
  b.y_low = 0.0;
  b.y_cap = 60.0;
  attach_bounds(f.data, b);

  LinearSpline ident;
  ident.knots = (Vector(2) << 0.0, 100.0).finished();
  ident.coefficients = (Vector(2) << 0.0, 100.0).finished();
  LinearSpline hconst;
  hconst.knots = ident.knots;
  hconst.coefficients = Vector::Constant(2, 1.3);
  hconst.clip_lo = 1e-8;
  f.splines.f = ident;
  f.splines.h = hconst;

  f.cp.delta_X = 0.5;
  f.cp.delta_Y = 0.4;
  f.cp.delta_drift = 0.3;
  f.cp.delta_0 = 0.2;
  f.cp.nu_drift = 1.0;
  f.cp.zeta_drift = 0.7;
  f.cp.zeta_0 = 0.9;
  f.cp.nu_0 = 0.0;
  f.cp.mu_early << 4.0, 8.0;
  f.cp.r_early = 0.5;
  f.cp.sigma_early << 4.0, 3.0, 3.0, 9.0;

  ChainState& s = f.state;
  s.x_grid = f.data.x_values;
  s.x_grid(0, 1) = 12.5;
  s.x_grid(1, 2) = 23.0;
  s.y_grid = f.data.y_values;
  s.y_grid(0, 2) = 5.0;
  s.y_grid(1, 2) = 9.5;
  s.gamma = (Vector(2) << 1.5, 1.8).finished();
  s.alpha = (Vector(2) << 0.8, 1.1).finished();
  s.x0 = (Vector(2) << 5.0, 18.0).finished();
  s.y0 = (Vector(2) << 2.0, 7.0).finished();
  s.beta = 0.6;
  s.rho = 0.3;
  s.sigma_X2 = 2.0;
  s.sigma_Y2 = 1.5;
  s.mu_drift = 1.2;
  s.sigma_drift2 = 0.6;
  s.mu_0 = 0.5;
  s.sigma_0_2 = 0.9;
  s.f_x.resize(2, 3);
  s.h_x.resize(2, 3);
  for (Index cc = 0; cc < 2; ++cc)
    for (Index t = 0; t < 3; ++t) {
      s.f_x(cc, t) = evaluate(f.splines.f, s.x_grid(cc, t));
      s.h_x(cc, t) = evaluate(f.splines.h, s.x_grid(cc, t));
    }
  return f;
}

bool moments_match(const std::vector<double>& draws, double mean, double var,
                   const std::string& what, Check& c) {
  const auto s = oracle::summarize(draws);
  c.require(std::abs(s.mean - mean) < 3.0 * s.se_mean, what + " mean");
  if (std::isfinite(var)) c.require(std::abs(s.var - var) < 3.0 * s.se_var, what + " var");
  return c.ok;
}

bool criterion_frozen_state(Check& c) {
  const Frozen f = make_frozen();
  const SamplerContext ctx{f.data, f.splines, f.cp};
  const int n = 60000;
  std::vector<double> draws(n);
  RngStream rng(4000);

  // Step 1: sigma_Y^2 via the full step on frozen copies.
  {
    const InvGammaCond cond = cond_sigma_y2(f.state, ctx);
    const auto m = oracle::inverse_gamma_moments(cond.shape, cond.rate);
    for (int i = 0; i < n; ++i) {
      ChainState s = f.state;
      step_sigma_y2(s, ctx, rng);
      draws[i] = s.sigma_Y2;
    }
    moments_match(draws, m.mean, m.var, "step1 sigma_Y2", c);
  }
  // Step 3: sigma_X^2.
  {
    const InvGammaCond cond = cond_sigma_x2(f.state, ctx);
    const auto m = oracle::inverse_gamma_moments(cond.shape, cond.rate);
    for (int i = 0; i < n; ++i) {
      ChainState s = f.state;
      step_sigma_x2(s, ctx, rng);
      draws[i] = s.sigma_X2;
    }
    moments_match(draws, m.mean, m.var, "step3 sigma_X2", c);
  }
  // Step 4: the mu_drift sub-draw through the step, gamma via its conditional.
  {
    const NormalCond cond = cond_mu_drift(f.state, ctx);
    for (int i = 0; i < n; ++i) {
      ChainState s = f.state;
      step_drift(s, ctx, rng);
      draws[i] = s.mu_drift;
    }
    moments_match(draws, cond.mean, cond.var, "step4 mu_drift", c);
    const NormalCond g = cond_gamma(f.state, ctx, 0);
    for (int i = 0; i < n; ++i) draws[i] = rng.normal(g.mean, g.var);
    moments_match(draws, g.mean, g.var, "step4 gamma", c);
  }
  // Step 5: mu_0 through the step, alpha via its conditional.
  {
    const NormalCond cond = cond_mu0(f.state, ctx);
    for (int i = 0; i < n; ++i) {
      ChainState s = f.state;
      step_intercepts(s, ctx, rng);
      draws[i] = s.mu_0;
    }
    moments_match(draws, cond.mean, cond.var, "step5 mu_0", c);
    const NormalCond a = cond_alpha(f.state, ctx, 1);
    for (int i = 0; i < n; ++i) draws[i] = rng.normal(a.mean, a.var);
    moments_match(draws, a.mean, a.var, "step5 alpha", c);
  }
  // Step 6: interior X cell (0,1) with observed neighbors, and terminal
  // X cell (1,2); both conditionals fully frozen within the sweep.
  {
    const TruncNormalCond ci = cond_x_interior(f.state, ctx, 0, 1);
    const auto mi = oracle::trunc_normal_moments(ci.mean, ci.var, ci.low, ci.up);
    std::vector<double> d2(n);
    for (int i = 0; i < n; ++i) {
      ChainState s = f.state;
      impute_x_sweep(s, ctx, rng);
      draws[i] = s.x_grid(0, 1);
      d2[i] = s.x_grid(1, 2);
    }
    moments_match(draws, mi.mean, mi.var, "step6 interior X", c);
    const TruncNormalCond ct = cond_x_terminal(f.state, ctx, 1);
    const auto mt = oracle::trunc_normal_moments(ct.mean, ct.var, ct.low, ct.up);
    moments_match(d2, mt.mean, mt.var, "step6 terminal X", c);
  }
  // Step 7: x0 for country 1 (its t = 1 X is observed, so the conditional
  // is frozen across the sweep).
  {
    const TruncNormalCond c0 = cond_x0(f.state, ctx, 1);
    const auto m0 = oracle::trunc_normal_moments(c0.mean, c0.var, c0.low, c0.up);
    for (int i = 0; i < n; ++i) {
      ChainState s = f.state;
      impute_x_sweep(s, ctx, rng);
      draws[i] = s.x0(1);
    }
    moments_match(draws, m0.mean, m0.var, "step7 x0", c);
  }
  // Steps 8-9 via the Y sweep (X grid untouched by it).
  {
    const TruncNormalCond ct = cond_y_terminal(f.state, ctx, 0);
    const auto mt = oracle::trunc_normal_moments(ct.mean, ct.var, ct.low, ct.up);
    const TruncNormalCond c0 = cond_y0(f.state, ctx, 0);
    const auto m0 = oracle::trunc_normal_moments(c0.mean, c0.var, c0.low, c0.up);
    std::vector<double> d2(n);
    for (int i = 0; i < n; ++i) {
      ChainState s = f.state;
      impute_y_sweep(s, ctx, rng);
      draws[i] = s.y_grid(0, 2);
      d2[i] = s.y0(0);
    }
    moments_match(draws, mt.mean, mt.var, "step8 terminal Y", c);
    moments_match(d2, m0.mean, m0.var, "step9 y0", c);
    // Interior Y conditional (frozen neighbors) via its parameters.
    ChainState s = f.state;
    s.y_grid(1, 2) = 9.5;
    const TruncNormalCond cy = cond_y_interior(s, ctx, 1, 1);
    const auto my = oracle::trunc_normal_moments(cy.mean, cy.var, cy.low, cy.up);
    for (int i = 0; i < n; ++i)
      draws[i] = sample_trunc_normal(cy.mean, cy.var, cy.low, cy.up, rng);
    moments_match(draws, my.mean, my.var, "step8 interior Y", c);
  }
  return c.ok;
}

// ---------------------------------------------------------------------------
// 5-7. Parameter recovery, MH tuning, bound enforcement

struct RecoveryTruth {
  double beta = 0.8, rho = 0.3, sigma_X2 = 1.0, sigma_Y2 = 0.49;
};

PanelDataset generate_model_data(const SplinePair& splines, const RecoveryTruth& truth,
                                 Vector& gamma, Vector& alpha, RngStream& rng) {
  const Index C = 10, T = 20;
  PanelDataset d;
  d.first_year = 1;
  gamma.resize(C);
  alpha.resize(C);
  Matrix x(C, T), y(C, T);
  for (Index c = 0; c < C; ++c) {
    std::string id = "C" + std::to_string(c + 10);
    d.country_ids.push_back(id);
    gamma(c) = 1.0 + 2.0 * static_cast<double>(c) / static_cast<double>(C - 1);
    // Intercepts at the scale the data-based prior construction assumes
    // (mu_0 is centered at zero with a first-difference-based spread).
    alpha(c) = rng.uniform(-0.4, 0.4);
    double x_prev = rng.uniform(20.0, 30.0);
    double y_prev = rng.uniform(0.0, 5.0);
    for (Index t = 0; t < T; ++t) {
      const double xv =
          sample_trunc_normal(x_prev + gamma(c), truth.sigma_X2, 0.0, 100.0, rng);
      const double mean =
          alpha(c) + truth.beta * evaluate(splines.f, xv) + truth.rho * y_prev;
      const double yv = sample_trunc_normal(mean, truth.sigma_Y2 * evaluate(splines.h, xv),
                                            0.0, std::min(xv, 60.0), rng);
      x(c, t) = xv;
      y(c, t) = yv;
      x_prev = xv;
      y_prev = yv;
    }
  }
  d.x_values = x;
  d.y_values = y;
  d.x_mask = BoolGrid::Constant(C, T, true);
  d.y_mask = BoolGrid::Constant(C, T, true);
  BoundsSpec b;
  b.x_low = 0.0;
  b.x_up = 100.0;
  b.y_low = 0.0;
  b.y_cap = 60.0;
  attach_bounds(d, b);
  return d;
}

SplinePair recovery_splines() {
  SplinePair sp;
  sp.f.knots = (Vector(3) << 0.0, 30.0, 100.0).finished();
  sp.f.coefficients = (Vector(3) << 2.0, 14.0, 20.0).finished();
  sp.h.knots = (Vector(2) << 0.0, 100.0).finished();
  sp.h.coefficients = Vector::Constant(2, 1.0);
  sp.h.clip_lo = 1e-8;
  return sp;
}

struct RecoveryResult {
  int covered_beta = 0, covered_rho = 0, covered_sx = 0, covered_sy = 0;
  double gamma_coverage = 0.0;
  bool all_converged = true;
  double min_acc = 1.0, max_acc = 0.0;
  int n_rep = 0;
};

RecoveryResult run_recovery(int n_rep) {
  const SplinePair splines = recovery_splines();
  const RecoveryTruth truth;
  RecoveryResult out;
  out.n_rep = n_rep;
  double gamma_cov_sum = 0.0;

  for (int rep = 0; rep < n_rep; ++rep) {
    RngStream gen(5000 + rep);
    Vector gamma, alpha;
    const PanelDataset d = generate_model_data(splines, truth, gamma, alpha, gen);
    const ControlParams cp = compute_control_params(d);
    const SamplerContext ctx{d, splines, cp};

    RngStream pilot_rng(6000 + rep);
    const PilotResult pilot = tune_phi(ctx, pilot_rng, 1500);

    const int n_chains = 4;
    std::vector<ChainState> chains;
    std::vector<RngStream> rngs;
    for (int k = 0; k < n_chains; ++k) {
      rngs.emplace_back(7000 + rep, k);
      chains.push_back(initialize_chain(ctx, rngs.back()));
    }

    // Estimation with a PSRF gate over the monitored scalars.
    std::vector<std::vector<double>> tb(n_chains), tr(n_chains), tsx(n_chains), tsy(n_chains);
    bool converged = false;
    int iters = 0;
    const int block = 1000, cap = 30000;
    long acc0 = 0, prop0 = 0;
    while (iters < cap && !converged) {
      for (int k = 0; k < n_chains; ++k)
        for (int i = 0; i < block; ++i) {
          gibbs_sweep(chains[k], ctx, pilot.tuning, rngs[k]);
          tb[k].push_back(chains[k].beta);
          tr[k].push_back(chains[k].rho);
          tsx[k].push_back(chains[k].sigma_X2);
          tsy[k].push_back(chains[k].sigma_Y2);
        }
      iters += block;
      const std::size_t keep = tb[0].size() / 2;
      if (keep >= 10) {
        auto tail = [&](const std::vector<std::vector<double>>& tv) {
          std::vector<std::vector<double>> per;
          for (const auto& t : tv) per.emplace_back(t.end() - keep, t.end());
          return split_rhat(per);
        };
        const double worst = std::max(std::max(tail(tb), tail(tr)),
                                      std::max(tail(tsx), tail(tsy)));
        converged = worst < 1.1;
      }
    }
    out.all_converged = out.all_converged && converged;
    for (const auto& s : chains) {
      acc0 += s.mh_accepts;
      prop0 += s.mh_proposals;
    }
    const double acc_rate = static_cast<double>(acc0) / static_cast<double>(prop0);
    out.min_acc = std::min(out.min_acc, acc_rate);
    out.max_acc = std::max(out.max_acc, acc_rate);

    // Posterior collection.
    std::vector<double> pb, pr, psx, psy;
    std::vector<std::vector<double>> pg(gamma.size());
    for (int k = 0; k < n_chains; ++k)
      for (int i = 0; i < 1500; ++i) {
        gibbs_sweep(chains[k], ctx, pilot.tuning, rngs[k]);
        if (i % 5 == 0) {
          pb.push_back(chains[k].beta);
          pr.push_back(chains[k].rho);
          psx.push_back(chains[k].sigma_X2);
          psy.push_back(chains[k].sigma_Y2);
          for (Index c = 0; c < gamma.size(); ++c) pg[c].push_back(chains[k].gamma(c));
        }
      }
    auto covered = [](std::vector<double> v, double target) {
      return target >= empirical_quantile(v, 0.025) && target <= empirical_quantile(v, 0.975);
    };
    out.covered_beta += covered(pb, truth.beta) ? 1 : 0;
    out.covered_rho += covered(pr, truth.rho) ? 1 : 0;
    out.covered_sx += covered(psx, truth.sigma_X2) ? 1 : 0;
    out.covered_sy += covered(psy, truth.sigma_Y2) ? 1 : 0;
    int gcov = 0;
    for (Index c = 0; c < gamma.size(); ++c) gcov += covered(pg[c], gamma(c)) ? 1 : 0;
    gamma_cov_sum += static_cast<double>(gcov) / static_cast<double>(gamma.size());
  }
  out.gamma_coverage = gamma_cov_sum / n_rep;
  return out;
}

RecoveryResult& recovery_cache() {
  static RecoveryResult cached = run_recovery(20);
  return cached;
}

bool criterion_recovery(Check& c) {
  const RecoveryResult r = recovery_cache();
  c.require(r.all_converged, "PSRF < 1.1 at termination in every replication");
  c.require(r.covered_beta >= 17, "beta coverage " + std::to_string(r.covered_beta) + "/20");
  c.require(r.covered_rho >= 17, "rho coverage " + std::to_string(r.covered_rho) + "/20");
  c.require(r.covered_sx >= 17, "sigma_X2 coverage " + std::to_string(r.covered_sx) + "/20");
  c.require(r.covered_sy >= 17, "sigma_Y2 coverage " + std::to_string(r.covered_sy) + "/20");
  c.require(r.gamma_coverage >= 0.85, "gamma coverage");
  return c.ok;
}

bool criterion_mh_tuning(Check& c) {
  const RecoveryResult r = recovery_cache();
  c.require(r.min_acc >= 0.30, "acceptance lower bound (min " + std::to_string(r.min_acc) + ")");
  c.require(r.max_acc <= 0.50, "acceptance upper bound (max " + std::to_string(r.max_acc) + ")");
  return c.ok;
}

MintsOptions desk_mints(int chains, int thin, int imp_iters, std::uint64_t seed) {
  MintsOptions o;
  o.seed = seed;
  o.run.n_chains = chains;
  o.run.n_thin = thin;
  o.run.n_imputation_iters = imp_iters;
  o.run.m_imputations = chains * (imp_iters / thin);
  o.run.estimation_block = 1000;
  o.run.max_estimation_iters = 10000;
  o.run.pilot_iters = 1000;
  o.run.psrf_threshold = 1.1;
  return o;
}

PanelDataset desk_nonlinear(std::uint64_t seed, int C = 10, int T = 20) {
  SimConfig cfg = SimConfig::nonlinear();
  cfg.n_countries = C;
  cfg.n_years = T;
  RngStream rng(seed);
  return gen_panel(cfg, rng);
}

bool criterion_bounds(Check& c) {
  const PanelDataset d = desk_nonlinear(321);
  const SplitDataset split = ampute(d, AmputationPlan::simulated(Mechanism::MCAR, 0.4, 11));
  MintsOptions opt = desk_mints(3, 50, 200, 777);
  const MintsRun run = run_mints(split.training, opt);
  long violations = 0;
  for (const auto& cd : run.completed)
    for (Index cc = 0; cc < d.n_countries(); ++cc)
      for (Index t = 0; t < d.n_years(); ++t) {
        const double x = cd.x(cc, t), y = cd.y(cc, t);
        if (x < d.bounds.x_low || x > d.bounds.x_up) ++violations;
        if (y < d.bounds.y_low || y > std::min(x, d.bounds.y_cap) + 1e-12) ++violations;
        if (split.training.x_mask(cc, t) && x != d.x_values(cc, t)) ++violations;
        if (split.training.y_mask(cc, t) && y != d.y_values(cc, t)) ++violations;
      }
  c.require(violations == 0,
            "found " + std::to_string(violations) + " bound/constancy violations");
  c.require(!run.completed.empty(), "no completed datasets");
  return c.ok;
}

// ---------------------------------------------------------------------------
// 8. Desk-scale analysis-model validation (MCAR 10%)

bool criterion_analysis_validation(Check& c) {
  const PanelDataset d = desk_nonlinear(654);
  SimConfig cfg = SimConfig::nonlinear();
  RngStream zrng(655);
  const Matrix z = gen_outcome_z(d.y_values, cfg, zrng);
  const BoolGrid z_mask = BoolGrid::Constant(d.n_countries(), d.n_years(), true);

  ExperimentGrid grid;
  grid.mechanisms = {Mechanism::MCAR};
  grid.rates = {0.10};
  grid.n_rep = 20;
  grid.mints = desk_mints(5, 200, 400, 888);

  const auto rows = run_analysis_validation(d, z, z_mask, grid);
  const auto& r = rows.at(0);
  c.require(r.n_failed == 0, "replication failures");
  const double covered = r.coverage * r.n_rep;
  c.require(covered >= 18.0 - 1e-9,
            "coverage " + std::to_string(static_cast<int>(covered + 0.5)) + "/20");
  c.require(r.mean_fmi < 0.15, "mean FMI " + std::to_string(r.mean_fmi));
  return c.ok;
}

// ---------------------------------------------------------------------------
// 9. Desk-scale out-of-sample validation (MCAR 40%)

bool criterion_oos_validation(Check& c) {
  const PanelDataset d = desk_nonlinear(654);
  ExperimentGrid grid;
  grid.mechanisms = {Mechanism::MCAR};
  grid.rates = {0.40};
  grid.mints = desk_mints(5, 1000, 5000, 999);
  grid.mints.pool_all = true;

  const auto rows = run_oos_validation(d, grid);
  const auto& r = rows.at(0);
  c.require(r.n_test > 0, "no test cells");
  c.require(r.mints.mae < r.spline_mae,
            "MAE " + std::to_string(r.mints.mae) + " !< spline " + std::to_string(r.spline_mae));
  c.require(r.mints.mae < r.mean_mae,
            "MAE " + std::to_string(r.mints.mae) + " !< mean " + std::to_string(r.mean_mae));
  c.require(r.mints.coverage >= 0.88 && r.mints.coverage <= 0.99,
            "coverage " + std::to_string(r.mints.coverage));
  return c.ok;
}

// ---------------------------------------------------------------------------
// 10. Amputation exactness

bool criterion_amputation(Check& c) {
  const PanelDataset d = desk_nonlinear(13, 10, 20);
  const double n = static_cast<double>(d.n_countries() * d.n_years());
  for (Mechanism mech : {Mechanism::MCAR, Mechanism::MAR, Mechanism::MNAR})
    for (double rate : {0.1, 0.4, 0.8}) {
      const SplitDataset s = ampute(d, AmputationPlan::simulated(mech, rate, 29));
      const double nx = static_cast<double>(s.x_test.count());
      const double ny = static_cast<double>(s.y_test.count());
      c.require(std::abs(nx - rate * n) <= 1.0, "X count at rate " + std::to_string(rate));
      c.require(std::abs(ny - rate * n) <= 1.0, "Y count at rate " + std::to_string(rate));
    }

  // MAR amputes strictly earlier years on average.
  const SplitDataset mar = ampute(d, AmputationPlan::simulated(Mechanism::MAR, 0.4, 31));
  double t_amp = 0.0, t_kept = 0.0;
  long n_amp = 0, n_kept = 0;
  for (Index cc = 0; cc < d.n_countries(); ++cc)
    for (Index t = 0; t < d.n_years(); ++t) {
      if (mar.y_test(cc, t)) {
        t_amp += static_cast<double>(t);
        ++n_amp;
      } else if (mar.training.y_mask(cc, t)) {
        t_kept += static_cast<double>(t);
        ++n_kept;
      }
    }
  c.require(t_amp / n_amp < t_kept / n_kept, "MAR mean year ordering");

  // MNAR with vanishing noise amputes exactly the smallest rate-quantile.
  AmputationPlan plan = AmputationPlan::simulated(Mechanism::MNAR, 0.4, 37);
  plan.noise_sd_x = 1e-6;
  plan.noise_sd_y = 1e-6;
  const SplitDataset mnar = ampute(d, plan);
  double max_amp = -kInf, min_kept = kInf;
  for (Index cc = 0; cc < d.n_countries(); ++cc)
    for (Index t = 0; t < d.n_years(); ++t) {
      if (mnar.y_test(cc, t)) max_amp = std::max(max_amp, d.y_values(cc, t));
      else if (mnar.training.y_mask(cc, t)) min_kept = std::min(min_kept, d.y_values(cc, t));
    }
  c.require(max_amp <= min_kept + 1e-3, "MNAR smallest-quantile property");
  return c.ok;
}

// ---------------------------------------------------------------------------
// 11. REML oracle

bool criterion_reml(Check& c) {
  struct Fixture {
    Vector y, x;
    std::vector<int> g;
  };
  std::vector<Fixture> fixtures;
  {
    Fixture f;
    f.y = (Vector(9) << 1.2, 2.1, 3.2, 4.9, 6.1, 7.0, 2.5, 3.4, 4.6).finished();
    f.x = (Vector(9) << 1, 2, 3, 1, 2, 3, 1, 2, 3).finished();
    f.g = {0, 0, 0, 1, 1, 1, 2, 2, 2};
    fixtures.push_back(f);
  }
  {
    Fixture f;
    RngStream rng(444);
    for (int gi = 0; gi < 6; ++gi) {
      const double u = rng.normal(0.0, 2.0);
      for (int j = 0; j < 4; ++j) {
        f.g.push_back(gi);
        const double x = rng.uniform(0.0, 8.0);
        const double y = 0.5 + 1.5 * x + u + rng.normal(0.0, 0.6);
        f.x.conservativeResize(f.x.size() + 1);
        f.y.conservativeResize(f.y.size() + 1);
        f.x(f.x.size() - 1) = x;
        f.y(f.y.size() - 1) = y;
      }
    }
    fixtures.push_back(f);
  }
  {
    Fixture f;
    RngStream rng(445);
    for (int gi = 0; gi < 3; ++gi)
      for (int j = 0; j < 5; ++j) {
        f.g.push_back(gi);
        const double x = j;
        const double y = 2.0 - 0.4 * x + rng.normal(0.0, 0.3);
        f.x.conservativeResize(f.x.size() + 1);
        f.y.conservativeResize(f.y.size() + 1);
        f.x(f.x.size() - 1) = x;
        f.y(f.y.size() - 1) = y;
      }
    fixtures.push_back(f);
  }

  int idx = 0;
  for (const auto& f : fixtures) {
    ++idx;
    const FitResult fit = fit_random_intercept(f.y, f.x, f.g);
    const double theta =
        fit.var_residual > 0.0 ? std::max(fit.var_random_intercept / fit.var_residual, 1e-8)
                               : 1e-8;
    const double at_opt = reml_profile(f.y, f.x, f.g, theta);
    double best = -kInf;
    for (int i = 0; i < 10000; ++i) {
      const double t =
          std::exp(std::log(1e-8) + (std::log(1e4) - std::log(1e-8)) * i / 9999.0);
      best = std::max(best, reml_profile(f.y, f.x, f.g, t));
    }
    c.require(at_opt >= best - 1e-6 * std::abs(best),
              "fixture " + std::to_string(idx) + " grid exceeds optimizer");
  }
  return c.ok;
}

// ---------------------------------------------------------------------------
// 12. Determinism of the full CLI pipeline

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

bool run_pipeline(const std::string& dir, Check& c) {
  auto sh = [&](const std::string& cmd) {
    const int rc = std::system(cmd.c_str());
    c.require(rc == 0, "command failed: " + cmd);
    return rc == 0;
  };
  const std::string q = "\"" + g_cli_path + "\"";
  if (!sh("mkdir -p " + dir)) return false;
  if (!sh(q + " simulate --regime nonlinear --seed 7 --countries 10 --years 12 --out " + dir +
          "/full.csv --z-out " + dir + "/z.csv"))
    return false;
  if (!sh(q + " ampute --in " + dir + "/full.csv --mechanism mar --rate 0.3 --seed 7 --out " +
          dir + "/train.csv --manifest " + dir + "/manifest.csv --bounds-cap 60"))
    return false;
  if (!sh(q + " impute --in " + dir + "/train.csv --out " + dir + "/completed.csv --summary " +
          dir + "/summary.txt --quantiles " + dir +
          "/quantiles.csv --chains 2 --m 4 --thin 20 --imp-iters 40 --max-iters 600 --block "
          "300 --pilot-iters 500 --seed 7 --bounds-cap 60 --psrf-threshold 1.5"))
    return false;

  // Per-imputation analysis estimates feed the pool step.
  std::ifstream in(dir + "/completed.csv");
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> by_imp;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::stringstream ss(line);
    std::string id, country, year, x, y;
    std::getline(ss, id, ',');
    std::getline(ss, country, ',');
    std::getline(ss, year, ',');
    std::getline(ss, x, ',');
    std::getline(ss, y, ',');
    auto& v = by_imp[std::stoi(id)];
    v.first.push_back(std::stod(x));
    v.second.push_back(std::stod(y));
  }
  std::ostringstream est;
  est << "imputation_id,estimate,variance\n";
  est.precision(12);
  for (const auto& [id, xy] : by_imp) {
    const Vector xv =
        Eigen::Map<const Vector>(xy.first.data(), static_cast<Index>(xy.first.size()));
    const Vector yv =
        Eigen::Map<const Vector>(xy.second.data(), static_cast<Index>(xy.second.size()));
    const FitResult f = fit_ols(yv, xv);
    est << id << ',' << f.slope << ',' << f.se_slope * f.se_slope << '\n';
  }
  std::ofstream est_out(dir + "/estimates.csv");
  est_out << est.str();
  est_out.close();
  if (!sh(q + " pool --in " + dir + "/estimates.csv --out " + dir + "/pooled.csv")) return false;
  return true;
}

bool criterion_determinism(Check& c) {
  if (g_cli_path.empty()) {
    c.require(false, "--cli path not provided");
    return false;
  }
  const std::string d1 = g_workdir + "/det_run1";
  const std::string d2 = g_workdir + "/det_run2";
  if (!run_pipeline(d1, c)) return false;
  if (!run_pipeline(d2, c)) return false;
  for (const char* f : {"full.csv", "z.csv", "train.csv", "manifest.csv", "completed.csv",
                        "summary.txt", "quantiles.csv", "estimates.csv", "pooled.csv"}) {
    const std::string a = slurp(d1 + "/" + f), b = slurp(d2 + "/" + f);
    c.require(!a.empty(), std::string(f) + " empty");
    c.require(a == b, std::string(f) + " differs between reruns");
  }
  return c.ok;
}

struct Criterion {
  int id;
  const char* name;
  std::function<bool(Check&)> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "pooling oracle", criterion_pooling},
      {2, "interval-score oracle", criterion_interval_score},
      {3, "truncated-normal correctness", criterion_trunc_normal},
      {4, "frozen-state conditionals", criterion_frozen_state},
      {5, "parameter recovery", criterion_recovery},
      {6, "MH proposal tuning", criterion_mh_tuning},
      {7, "bound enforcement", criterion_bounds},
      {8, "analysis-model validation (MCAR 10%)", criterion_analysis_validation},
      {9, "out-of-sample validation (MCAR 40%)", criterion_oos_validation},
      {10, "amputation exactness", criterion_amputation},
      {11, "REML profile oracle", criterion_reml},
      {12, "pipeline determinism", criterion_determinism},
  };
  return all;
}

} // namespace

int main(int argc, char** argv) {
  int which = 0;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--criterion") which = std::atoi(argv[i + 1]);
    if (flag == "--cli") g_cli_path = argv[i + 1];
    if (flag == "--workdir") g_workdir = argv[i + 1];
  }

  bool all_ok = true;
  for (const auto& crit : criteria()) {
    if (which != 0 && crit.id != which) continue;
    Check c;
    bool ok = false;
    try {
      ok = crit.run(c);
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    ok = ok && c.ok;
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << crit.id << ": " << crit.name;
    if (!ok && !c.detail.empty()) std::cout << " (" << c.detail << ")";
    std::cout << std::endl;
    all_ok = all_ok && ok;
  }
  return all_ok ? 0 : 1;
}
