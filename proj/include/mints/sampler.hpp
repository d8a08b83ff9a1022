#ifndef MINTS_SAMPLER_HPP
#define MINTS_SAMPLER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mints/distributions.hpp"
#include "mints/panel_data.hpp"
#include "mints/priors.hpp"
#include "mints/splines.hpp"

namespace mints {

// One chain's parameter vector plus its current completed grids. Observed
// cells of x_grid / y_grid never change; missing cells hold the current
// imputed values. f_x / h_x cache the spline evaluations at x_grid.
struct ChainState {
  Vector gamma; // per-country drift
  double sigma_X2 = 1.0;
  Vector x0;
  double mu_drift = 0.0;
  double sigma_drift2 = 1.0;

  Vector alpha; // per-country intercept
  double beta = 0.0;
  double rho = 0.5;
  double sigma_Y2 = 1.0;
  Vector y0;
  double mu_0 = 0.0;
  double sigma_0_2 = 1.0;

  Matrix x_grid, y_grid;
  Matrix f_x, h_x;

  long iteration = 0;
  long mh_proposals = 0;
  long mh_accepts = 0;
  long degenerate_y_windows = 0;
  long degenerate_x_windows = 0;
};

// Metropolis-Hastings proposal scale for the (beta, rho) block. The base
// covariance is fixed; phi is calibrated by a pilot run toward the 40%
// acceptance target.
struct ProposalTuning {
  double phi = 1.0;
  Matrix2 base_cov = (Matrix2() << 0.001475944, -0.001511349,
                                   -0.001511349, 0.001577437).finished();
  double acceptance_target = 0.40;
};

struct RunConfig {
  int n_chains = 10;
  int n_imputation_iters = 4000;
  int n_thin = 1000;
  int m_imputations = 40; // must equal n_chains * (n_imputation_iters / n_thin)
  int estimation_block = 5000;
  int max_estimation_iters = 50000;
  double psrf_threshold = 1.1;
  int pilot_iters = 2000;
  int n_monitor_cells = 5;
  int jobs = 0; // 0 = hardware concurrency

  void check() const; // throws on inconsistent settings
};

// Read-only inputs shared by every chain.
struct SamplerContext {
  const PanelDataset& data;
  const SplinePair& splines;
  const ControlParams& cp;
};

struct NormalCond {
  double mean = 0.0, var = 1.0;
};
struct InvGammaCond {
  double shape = 1.0, rate = 1.0;
};
struct TruncNormalCond {
  double mean = 0.0, var = 1.0, low = -kInf, up = kInf;
};

// Full conditionals of the Gibbs sweep, exposed so frozen-state tests can
// check the sampled draws against analytic moments. Each reads only the
// current state (plus context).
InvGammaCond cond_sigma_y2(const ChainState& s, const SamplerContext& ctx);
InvGammaCond cond_sigma_x2(const ChainState& s, const SamplerContext& ctx);
NormalCond cond_mu_drift(const ChainState& s, const SamplerContext& ctx);
InvGammaCond cond_sigma_drift2(const ChainState& s, const SamplerContext& ctx);
NormalCond cond_gamma(const ChainState& s, const SamplerContext& ctx, Index c);
NormalCond cond_mu0(const ChainState& s, const SamplerContext& ctx);
InvGammaCond cond_sigma02(const ChainState& s, const SamplerContext& ctx);
NormalCond cond_alpha(const ChainState& s, const SamplerContext& ctx, Index c);
TruncNormalCond cond_x_terminal(const ChainState& s, const SamplerContext& ctx, Index c);
TruncNormalCond cond_x_interior(const ChainState& s, const SamplerContext& ctx, Index c, Index t);
TruncNormalCond cond_x0(const ChainState& s, const SamplerContext& ctx, Index c);
TruncNormalCond cond_y_terminal(const ChainState& s, const SamplerContext& ctx, Index c);
TruncNormalCond cond_y_interior(const ChainState& s, const SamplerContext& ctx, Index c, Index t);
TruncNormalCond cond_y0(const ChainState& s, const SamplerContext& ctx, Index c);

// Weighted sum of squared mean-model residuals of the Y | X model; the
// exponent driving the (beta, rho) acceptance ratio.
double y_model_sum_squares(const ChainState& s, const SamplerContext& ctx, double beta,
                           double rho);

// Missing cells initialized by within-country interpolation / constant
// extrapolation (X), spline predictions (Y), then per-chain jitter inside
// the bounds; parameters drawn from diffuse versions of the priors.
ChainState initialize_chain(const SamplerContext& ctx, RngStream& rng);

// Individual sweep steps, in the printed order of the algorithm.
void step_sigma_y2(ChainState& s, const SamplerContext& ctx, RngStream& rng);
void step_sigma_x2(ChainState& s, const SamplerContext& ctx, RngStream& rng);
void step_variances(ChainState& s, const SamplerContext& ctx, RngStream& rng);
bool step_beta_rho(ChainState& s, const SamplerContext& ctx, const ProposalTuning& tuning,
                   RngStream& rng);
void step_drift(ChainState& s, const SamplerContext& ctx, RngStream& rng);
void step_intercepts(ChainState& s, const SamplerContext& ctx, RngStream& rng);
void impute_x_sweep(ChainState& s, const SamplerContext& ctx, RngStream& rng);
void impute_y_sweep(ChainState& s, const SamplerContext& ctx, RngStream& rng);

// One full Gibbs/MH iteration (steps 1-9) in printed order.
void gibbs_sweep(ChainState& s, const SamplerContext& ctx, const ProposalTuning& tuning,
                 RngStream& rng);

// Pilot run with Robbins-Monro adaptation of log(phi) toward the
// acceptance target; phi is frozen afterwards.
struct PilotResult {
  ProposalTuning tuning;
  double final_acceptance = 0.0;
  bool converged = true;
};
PilotResult tune_phi(const SamplerContext& ctx, RngStream& rng, int pilot_iters = 2000,
                     ProposalTuning start = ProposalTuning{});

// Split-chain potential scale reduction factor. Throws with fewer than 2
// chains or traces shorter than 10.
double split_rhat(const std::vector<std::vector<double>>& chains);

struct CellRef {
  int variable = 1; // 0 = X, 1 = Y
  Index c = 0, t = 0;
};

struct ConvergenceReport {
  bool converged = false;
  int iterations = 0;
  std::vector<std::string> monitor_names;
  std::vector<double> psrf;
  double max_psrf = 0.0;
};

// Completed dataset harvested from one iteration of one chain: observed
// cells plus that iteration's imputed grids.
struct CompletedDataset {
  int chain = 0;
  long iteration = 0;
  Matrix x, y;
};

struct MintsOptions {
  RunConfig run;
  AsplineConfig spline;
  double spline_eps = 0.05;
  YearWindow early_window{};
  std::uint64_t seed = 1;
  std::uint64_t replication = 0; // offsets the RNG streams per harness replication
  bool pool_all = false;         // collect every imputation-phase iteration
  std::vector<CellRef> predictive_cells; // cells whose draws are pooled
};

struct MintsRun {
  SplinePair splines;
  ControlParams cp;
  ProposalTuning tuning;
  double pilot_acceptance = 0.0;
  ConvergenceReport convergence;
  double estimation_acceptance = 0.0;
  std::vector<CompletedDataset> completed;
  std::vector<std::vector<double>> predictive_draws; // parallel to predictive_cells
  double lag1_autocorr = 0.0;
  long degenerate_y_windows = 0;
  long degenerate_x_windows = 0;
};

// Full engine: spline fit on complete cases, data-based priors, pilot
// tuning, convergence-gated estimation, thinned imputation phase.
MintsRun run_mints(const PanelDataset& d, const MintsOptions& opt);

// Imputation phase only, over already-converged chains; exposed for tests.
// Harvests states every n_thin iterations into M completed datasets and
// pools draws for the requested cells.
struct ImputationResult {
  std::vector<CompletedDataset> completed;
  std::vector<std::vector<double>> predictive_draws;
  double lag1_autocorr = 0.0;
};
ImputationResult run_imputation(std::vector<ChainState>& chains, const SamplerContext& ctx,
                                const ProposalTuning& tuning, const RunConfig& config,
                                std::vector<RngStream>& rngs,
                                const std::vector<CellRef>& predictive_cells = {},
                                bool pool_all = false);

} // namespace mints

#endif
