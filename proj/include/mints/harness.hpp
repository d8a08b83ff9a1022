#ifndef MINTS_HARNESS_HPP
#define MINTS_HARNESS_HPP

#include <optional>
#include <string>
#include <vector>

#include "mints/amputation.hpp"
#include "mints/metrics.hpp"
#include "mints/pooling.hpp"
#include "mints/sampler.hpp"

namespace mints {

enum class AnalysisModel { OLS, RandomIntercept };
enum class AnalysisTarget { Slope, RandomInterceptVariance };

// What to fit on each completed dataset and which rows enter the fit.
struct AnalysisSpec {
  AnalysisModel model = AnalysisModel::OLS;
  AnalysisTarget target = AnalysisTarget::Slope;
  double outcome_filter_min = -kInf; // keep rows with outcome above this
  // Real-data convention: fits restricted to simulated-as-missing cells,
  // truth estimated from the observed cells of the full dataset.
  bool real_data_mode = false;
};

struct ExperimentGrid {
  std::vector<Mechanism> mechanisms{Mechanism::MCAR, Mechanism::MAR, Mechanism::MNAR};
  std::vector<double> rates{0.10, 0.40, 0.80};
  int n_rep = 20;
  bool enrollment_noise = false; // amputation noise defaults per data context
  AnalysisSpec analysis;
  MintsOptions mints; // imputation configuration, including the master seed
};

struct AnalysisExperimentSummary {
  Mechanism mechanism = Mechanism::MCAR;
  double rate = 0.0;
  int n_rep = 0;
  int n_failed = 0;
  double truth = 0.0;
  double mae = 0.0;       // of the pooled point estimates
  double coverage = 0.0;  // of the pooled 95% intervals
  double mean_fmi = 0.0;
  double baseline_mae = 0.0; // mean-imputation anchor
};

struct OosExperimentSummary {
  Mechanism mechanism = Mechanism::MCAR;
  double rate = 0.0;
  Index n_test = 0;
  ScoreReport mints;
  double spline_mae = 0.0; // spline-only point predictor f(X) anchor
  double mean_mae = 0.0;   // mean-imputation anchor
};

// Analysis-model validation: per replication ampute, impute M datasets,
// fit the analysis model on each, Rubin-pool, score against the truth.
// Replication failures are skipped and counted; an experiment aborts when
// more than 10% of its replications fail.
std::vector<AnalysisExperimentSummary> run_analysis_validation(const PanelDataset& d,
                                                               const Matrix& outcome,
                                                               const BoolGrid& outcome_mask,
                                                               const ExperimentGrid& grid);

// Out-of-sample validation: one replication per experiment; posterior
// predictive draws pooled across all imputation-phase iterations of all
// chains, per-cell medians and 95% quantiles scored against the held-out
// truth for Y.
std::vector<OosExperimentSummary> run_oos_validation(const PanelDataset& d,
                                                     const ExperimentGrid& grid);

// Empirical quantile (linear interpolation between order statistics).
double empirical_quantile(std::vector<double> draws, double p);

std::string mechanism_name(Mechanism m);
Mechanism mechanism_from(const std::string& name);

} // namespace mints

#endif
