#include "mints/harness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mints/analysis.hpp"

namespace mints {

std::string mechanism_name(Mechanism m) {
  switch (m) {
    case Mechanism::MCAR: return "mcar";
    case Mechanism::MAR: return "mar";
    case Mechanism::MNAR: return "mnar";
  }
  return "?";
}

Mechanism mechanism_from(const std::string& name) {
  if (name == "mcar" || name == "MCAR") return Mechanism::MCAR;
  if (name == "mar" || name == "MAR") return Mechanism::MAR;
  if (name == "mnar" || name == "MNAR") return Mechanism::MNAR;
  throw std::invalid_argument("unknown mechanism '" + name + "'");
}

double empirical_quantile(std::vector<double> draws, double p) {
  if (draws.empty()) throw std::invalid_argument("empirical_quantile: no draws");
  std::sort(draws.begin(), draws.end());
  const double idx = p * static_cast<double>(draws.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(idx);
  const std::size_t hi = std::min(lo + 1, draws.size() - 1);
  const double w = idx - static_cast<double>(lo);
  return (1.0 - w) * draws[lo] + w * draws[hi];
}

namespace {

AmputationPlan plan_for(const ExperimentGrid& grid, Mechanism mech, double rate,
                        std::uint64_t seed) {
  return grid.enrollment_noise ? AmputationPlan::enrollment(mech, rate, seed)
                               : AmputationPlan::simulated(mech, rate, seed);
}

// Rows entering an analysis fit: outcome present and above the filter;
// in real-data mode additionally restricted to simulated-as-missing Y cells.
struct FitRows {
  Vector z, y;
  std::vector<int> groups;
};

FitRows gather_rows(const Matrix& y_grid, const Matrix& outcome, const BoolGrid& outcome_mask,
                    const AnalysisSpec& spec, const BoolGrid* restrict_to) {
  std::vector<double> zs, ys;
  std::vector<int> gs;
  for (Index c = 0; c < y_grid.rows(); ++c)
    for (Index t = 0; t < y_grid.cols(); ++t) {
      if (!outcome_mask(c, t)) continue;
      if (restrict_to && !(*restrict_to)(c, t)) continue;
      if (!(outcome(c, t) > spec.outcome_filter_min)) continue;
      zs.push_back(outcome(c, t));
      ys.push_back(y_grid(c, t));
      gs.push_back(static_cast<int>(c));
    }
  FitRows rows;
  rows.z = Eigen::Map<Vector>(zs.data(), static_cast<Index>(zs.size()));
  rows.y = Eigen::Map<Vector>(ys.data(), static_cast<Index>(ys.size()));
  rows.groups = std::move(gs);
  return rows;
}

struct Estimate {
  double q = 0.0;
  double u = 0.0; // squared standard error
};

Estimate fit_target(const FitRows& rows, const AnalysisSpec& spec) {
  if (spec.model == AnalysisModel::OLS) {
    const FitResult f = fit_ols(rows.z, rows.y);
    return {f.slope, f.se_slope * f.se_slope};
  }
  const FitResult f = fit_random_intercept(rows.z, rows.y, rows.groups);
  if (spec.target == AnalysisTarget::RandomInterceptVariance)
    return {f.var_random_intercept, 0.0};
  return {f.slope, f.se_slope * f.se_slope};
}

// Mean-imputation anchor: missing Y filled with the observed-Y mean.
Matrix mean_completed_y(const PanelDataset& training) {
  double sum = 0.0;
  long n = 0;
  for (Index c = 0; c < training.n_countries(); ++c)
    for (Index t = 0; t < training.n_years(); ++t)
      if (training.y_mask(c, t)) {
        sum += training.y_values(c, t);
        ++n;
      }
  const double mean = n > 0 ? sum / static_cast<double>(n) : 0.0;
  Matrix y = training.y_values;
  for (Index c = 0; c < training.n_countries(); ++c)
    for (Index t = 0; t < training.n_years(); ++t)
      if (!training.y_mask(c, t)) y(c, t) = mean;
  return y;
}

// Deterministic within-country interpolation of the training X grid,
// the input to the spline-only predictor.
Matrix interpolated_x(const PanelDataset& training) {
  Matrix x = training.x_values;
  for (Index c = 0; c < training.n_countries(); ++c) {
    std::vector<Index> obs;
    for (Index t = 0; t < training.n_years(); ++t)
      if (training.x_mask(c, t)) obs.push_back(t);
    for (Index t = 0; t < training.n_years(); ++t) {
      if (training.x_mask(c, t)) continue;
      auto it = std::lower_bound(obs.begin(), obs.end(), t);
      if (it == obs.begin())
        x(c, t) = training.x_values(c, obs.front());
      else if (it == obs.end())
        x(c, t) = training.x_values(c, obs.back());
      else {
        const Index hi = *it, lo = *(it - 1);
        const double w = static_cast<double>(t - lo) / static_cast<double>(hi - lo);
        x(c, t) = (1.0 - w) * training.x_values(c, lo) + w * training.x_values(c, hi);
      }
    }
  }
  return x;
}

} // namespace

std::vector<AnalysisExperimentSummary> run_analysis_validation(const PanelDataset& d,
                                                               const Matrix& outcome,
                                                               const BoolGrid& outcome_mask,
                                                               const ExperimentGrid& grid) {
  if (outcome.rows() != d.n_countries() || outcome.cols() != d.n_years())
    throw std::invalid_argument("run_analysis_validation: outcome grid shape mismatch");

  std::vector<AnalysisExperimentSummary> out;
  std::uint64_t experiment_id = 0;
  for (Mechanism mech : grid.mechanisms)
    for (double rate : grid.rates) {
      ++experiment_id;
      AnalysisExperimentSummary sum;
      sum.mechanism = mech;
      sum.rate = rate;

      // Truth: full data for synthetic exercises, the observed cells of the
      // full dataset in real-data mode.
      {
        const FitRows rows =
            gather_rows(d.y_values, outcome, outcome_mask, grid.analysis,
                        grid.analysis.real_data_mode ? &d.y_mask : nullptr);
        sum.truth = fit_target(rows, grid.analysis).q;
      }

      double abs_err = 0.0, covered = 0.0, fmi = 0.0, baseline_abs = 0.0;
      int done = 0, failed = 0;
      for (int rep = 0; rep < grid.n_rep; ++rep) {
        const std::uint64_t rep_seed =
            derive_seed(grid.mints.seed, experiment_id, static_cast<std::uint64_t>(rep));
        try {
          const SplitDataset split = ampute(d, plan_for(grid, mech, rate, rep_seed));

          MintsOptions opt = grid.mints;
          opt.seed = rep_seed;
          const MintsRun run = run_mints(split.training, opt);

          const BoolGrid* restrict_to =
              grid.analysis.real_data_mode ? &split.y_test : nullptr;
          Vector q_hats(static_cast<Index>(run.completed.size()));
          Vector u_hats(static_cast<Index>(run.completed.size()));
          for (std::size_t m = 0; m < run.completed.size(); ++m) {
            const FitRows rows = gather_rows(run.completed[m].y, outcome, outcome_mask,
                                             grid.analysis, restrict_to);
            const Estimate est = fit_target(rows, grid.analysis);
            q_hats(static_cast<Index>(m)) = est.q;
            u_hats(static_cast<Index>(m)) = est.u;
          }
          const PooledEstimate pooled = pool(q_hats, u_hats, 0.95);
          abs_err += std::abs(pooled.q_bar - sum.truth);
          covered += (sum.truth >= pooled.ci_low && sum.truth <= pooled.ci_high) ? 1.0 : 0.0;
          fmi += pooled.fmi;

          const Matrix baseline_y = mean_completed_y(split.training);
          const FitRows base_rows =
              gather_rows(baseline_y, outcome, outcome_mask, grid.analysis, restrict_to);
          baseline_abs += std::abs(fit_target(base_rows, grid.analysis).q - sum.truth);
          ++done;
        } catch (const std::exception&) {
          ++failed;
          if (failed * 10 > grid.n_rep)
            throw std::runtime_error("experiment " + mechanism_name(mech) + " rate " +
                                     std::to_string(rate) + ": more than 10% of replications failed");
        }
      }
      sum.n_rep = done;
      sum.n_failed = failed;
      if (done > 0) {
        sum.mae = abs_err / done;
        sum.coverage = covered / done;
        sum.mean_fmi = fmi / done;
        sum.baseline_mae = baseline_abs / done;
      }
      out.push_back(sum);
    }
  return out;
}

std::vector<OosExperimentSummary> run_oos_validation(const PanelDataset& d,
                                                     const ExperimentGrid& grid) {
  std::vector<OosExperimentSummary> out;
  std::uint64_t experiment_id = 0;
  for (Mechanism mech : grid.mechanisms)
    for (double rate : grid.rates) {
      ++experiment_id;
      const std::uint64_t seed = derive_seed(grid.mints.seed, experiment_id, 0);
      const SplitDataset split = ampute(d, plan_for(grid, mech, rate, seed));

      OosExperimentSummary sum;
      sum.mechanism = mech;
      sum.rate = rate;

      std::vector<CellRef> cells;
      std::vector<double> truths;
      for (Index c = 0; c < d.n_countries(); ++c)
        for (Index t = 0; t < d.n_years(); ++t)
          if (split.y_test(c, t)) {
            cells.push_back({1, c, t});
            truths.push_back(split.y_truth(c, t));
          }
      sum.n_test = static_cast<Index>(cells.size());
      if (cells.empty()) {
        out.push_back(sum);
        continue;
      }

      MintsOptions opt = grid.mints;
      opt.seed = seed;
      opt.pool_all = true;
      opt.predictive_cells = cells;
      const MintsRun run = run_mints(split.training, opt);

      const Index n = sum.n_test;
      Vector truth_v(n), med(n), lo(n), hi(n);
      for (Index i = 0; i < n; ++i) {
        truth_v(i) = truths[i];
        med(i) = empirical_quantile(run.predictive_draws[i], 0.5);
        lo(i) = empirical_quantile(run.predictive_draws[i], 0.025);
        hi(i) = empirical_quantile(run.predictive_draws[i], 0.975);
      }
      sum.mints = score_predictions(truth_v, med, lo, hi);

      // Anchors: spline-only prediction at the interpolated X, and the
      // observed-Y mean.
      const Matrix x_fill = interpolated_x(split.training);
      const Matrix mean_y = mean_completed_y(split.training);
      double spline_abs = 0.0, mean_abs = 0.0;
      for (Index i = 0; i < n; ++i) {
        const CellRef& ref = cells[static_cast<std::size_t>(i)];
        const double fx = evaluate(run.splines.f, x_fill(ref.c, ref.t));
        spline_abs += std::abs(truth_v(i) - fx);
        mean_abs += std::abs(truth_v(i) - mean_y(ref.c, ref.t));
      }
      sum.spline_mae = spline_abs / static_cast<double>(n);
      sum.mean_mae = mean_abs / static_cast<double>(n);
      out.push_back(sum);
    }
  return out;
}

} // namespace mints
