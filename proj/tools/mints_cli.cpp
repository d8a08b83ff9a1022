// Command-line surface for the imputation library: simulation, amputation,
// spline inspection, imputation, pooling, validation harnesses, and small
// debug fits. All outputs are written atomically and start with a comment
// line carrying the version, seed, and resolved-config hash.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

#include "mints/amputation.hpp"
#include "mints/analysis.hpp"
#include "mints/config.hpp"
#include "mints/harness.hpp"
#include "mints/math.hpp"
#include "mints/panel_data.hpp"
#include "mints/pooling.hpp"
#include "mints/sampler.hpp"
#include "mints/simgen.hpp"

namespace {

using namespace mints;

std::string csv_comment_block(const Config& cfg, std::uint64_t seed) {
  std::ostringstream out;
  out << file_header(seed, cfg.hash()) << "\n";
  std::istringstream snap(cfg.snapshot());
  std::string line;
  while (std::getline(snap, line)) out << "# cfg " << line << "\n";
  return out.str();
}

void write_panel_atomic(const PanelDataset& d, const std::string& path, const Config& cfg,
                        std::uint64_t seed) {
  std::ostringstream out;
  out << csv_comment_block(cfg, seed);
  out << "country,year,x,y\n";
  out.precision(12);
  for (Index c = 0; c < d.n_countries(); ++c)
    for (Index t = 0; t < d.n_years(); ++t) {
      out << d.country_ids[c] << ',' << d.year_of(t) << ',';
      if (d.x_mask(c, t)) out << d.x_values(c, t);
      out << ',';
      if (d.y_mask(c, t)) out << d.y_values(c, t);
      out << '\n';
    }
  atomic_write(path, out.str());
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  return out;
}

BoundsSpec bounds_from(const Config& cfg) {
  BoundsSpec b;
  b.x_low = cfg.get_double("bounds.x_low");
  const std::string xu = cfg.get("bounds.x_up");
  b.x_up = (xu == "inf") ? kInf : cfg.get_double("bounds.x_up");
  b.y_low = cfg.get_double("bounds.y_low");
  b.y_cap = cfg.get_double("bounds.cap");
  return b;
}

MintsOptions mints_options_from(const Config& cfg) {
  MintsOptions o;
  o.run.n_chains = static_cast<int>(cfg.get_long("impute.chains"));
  o.run.m_imputations = static_cast<int>(cfg.get_long("impute.m"));
  o.run.n_thin = static_cast<int>(cfg.get_long("impute.thin"));
  o.run.n_imputation_iters = static_cast<int>(cfg.get_long("impute.imp_iters"));
  o.run.estimation_block = static_cast<int>(cfg.get_long("impute.block"));
  o.run.max_estimation_iters = static_cast<int>(cfg.get_long("impute.max_iters"));
  o.run.psrf_threshold = cfg.get_double("impute.psrf_threshold");
  o.run.pilot_iters = static_cast<int>(cfg.get_long("impute.pilot_iters"));
  o.run.jobs = static_cast<int>(cfg.get_long("jobs"));
  o.spline.max_knots = static_cast<int>(cfg.get_long("spline.max_knots"));
  o.spline.bic_grid = static_cast<int>(cfg.get_long("spline.bic_grid"));
  o.spline_eps = cfg.get_double("spline.eps");
  o.early_window.lo = static_cast<int>(cfg.get_long("prior.early_lo"));
  o.early_window.hi = static_cast<int>(cfg.get_long("prior.early_hi"));
  o.seed = static_cast<std::uint64_t>(cfg.get_long("seed"));
  o.pool_all = cfg.get_bool("impute.pool_all");
  return o;
}

void register_defaults(Config& cfg) {
  cfg.set_default("seed", "1");
  cfg.set_default("jobs", "0");
  cfg.set_default("impute.chains", "10");
  cfg.set_default("impute.m", "40");
  cfg.set_default("impute.thin", "1000");
  cfg.set_default("impute.imp_iters", "4000");
  cfg.set_default("impute.block", "5000");
  cfg.set_default("impute.max_iters", "50000");
  cfg.set_default("impute.psrf_threshold", "1.1");
  cfg.set_default("impute.pilot_iters", "2000");
  cfg.set_default("impute.pool_all", "false");
  cfg.set_default("bounds.x_low", "0");
  cfg.set_default("bounds.x_up", "inf");
  cfg.set_default("bounds.y_low", "0");
  cfg.set_default("bounds.cap", "100");
  cfg.set_default("spline.max_knots", "40");
  cfg.set_default("spline.eps", "0.05");
  cfg.set_default("spline.bic_grid", "30");
  cfg.set_default("prior.early_lo", "0");
  cfg.set_default("prior.early_hi", "0");
  cfg.set_default("interval_score.distance_weighted", "false");
  // Simulation
  cfg.set_default("sim.regime", "nonlinear");
  cfg.set_default("sim.countries", "20");
  cfg.set_default("sim.years", "30");
  // Amputation
  cfg.set_default("ampute.mechanism", "mcar");
  cfg.set_default("ampute.rate", "0.1");
  cfg.set_default("ampute.context", "simulated");
  cfg.set_default("ampute.noise_x", "0");
  cfg.set_default("ampute.noise_y", "0");
  // Validation grid
  cfg.set_default("grid.mechanisms", "mcar,mar,mnar");
  cfg.set_default("grid.rates", "0.1,0.4,0.8");
  cfg.set_default("grid.n_rep", "20");
  cfg.set_default("analysis.model", "ols");
  cfg.set_default("analysis.target", "slope");
  cfg.set_default("analysis.filter_min", "-inf");
  cfg.set_default("analysis.real_data", "false");
  cfg.set_default("data.path", "");
  cfg.set_default("data.regime", "nonlinear");
  cfg.set_default("data.countries", "20");
  cfg.set_default("data.years", "30");
  cfg.set_default("outcome.path", "");
  cfg.set_default("pool.level", "0.95");
}

int cmd_simulate(Config& cfg, const std::string& out_path, const std::string& z_path) {
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_long("seed"));
  SimConfig sim = cfg.get("sim.regime") == "linear" ? SimConfig::linear()
                                                    : SimConfig::nonlinear();
  sim.n_countries = static_cast<int>(cfg.get_long("sim.countries"));
  sim.n_years = static_cast<int>(cfg.get_long("sim.years"));
  sim.seed = seed;
  RngStream rng(seed, 0x5157);
  const PanelDataset d = gen_panel(sim, rng);
  write_panel_atomic(d, out_path, cfg, seed);
  if (!z_path.empty()) {
    RngStream zrng(seed, 0x5158);
    const Matrix z = gen_outcome_z(d.y_values, sim, zrng);
    std::ostringstream out;
    out << csv_comment_block(cfg, seed) << "country,year,z\n";
    out.precision(12);
    for (Index c = 0; c < d.n_countries(); ++c)
      for (Index t = 0; t < d.n_years(); ++t)
        out << d.country_ids[c] << ',' << d.year_of(t) << ',' << z(c, t) << '\n';
    atomic_write(z_path, out.str());
  }
  return 0;
}

int cmd_ampute(Config& cfg, const std::string& in_path, const std::string& out_path,
               const std::string& manifest_path) {
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_long("seed"));
  const PanelDataset d = load_csv(in_path, bounds_from(cfg));
  const Mechanism mech = mechanism_from(cfg.get("ampute.mechanism"));
  const double rate = cfg.get_double("ampute.rate");
  AmputationPlan plan = cfg.get("ampute.context") == "enrollment"
                            ? AmputationPlan::enrollment(mech, rate, seed)
                            : AmputationPlan::simulated(mech, rate, seed);
  if (cfg.get_double("ampute.noise_x") > 0.0) plan.noise_sd_x = cfg.get_double("ampute.noise_x");
  if (cfg.get_double("ampute.noise_y") > 0.0) plan.noise_sd_y = cfg.get_double("ampute.noise_y");
  const SplitDataset split = ampute(d, plan);
  write_panel_atomic(split.training, out_path, cfg, seed);
  if (!manifest_path.empty()) {
    std::ostringstream out;
    out << csv_comment_block(cfg, seed) << "variable,country,year,true_value\n";
    out.precision(12);
    for (Index c = 0; c < d.n_countries(); ++c)
      for (Index t = 0; t < d.n_years(); ++t) {
        if (split.x_test(c, t))
          out << "x," << d.country_ids[c] << ',' << d.year_of(t) << ',' << split.x_truth(c, t)
              << '\n';
        if (split.y_test(c, t))
          out << "y," << d.country_ids[c] << ',' << d.year_of(t) << ',' << split.y_truth(c, t)
              << '\n';
      }
    atomic_write(manifest_path, out.str());
  }
  return 0;
}

int cmd_fit_spline(Config& cfg, const std::string& in_path, const std::string& out_path) {
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_long("seed"));
  const PanelDataset d = load_csv(in_path, bounds_from(cfg));
  const CompleteCases cc = complete_cases(d);
  AsplineConfig acfg;
  acfg.max_knots = static_cast<int>(cfg.get_long("spline.max_knots"));
  acfg.bic_grid = static_cast<int>(cfg.get_long("spline.bic_grid"));
  const SplinePair pair = estimate_f_h(cc.x, cc.y, d.bounds.y_low, d.bounds.y_cap,
                                       cfg.get_double("spline.eps"), acfg);
  std::ostringstream out;
  out << csv_comment_block(cfg, seed) << "function,knot,coefficient\n";
  out.precision(12);
  for (Index i = 0; i < pair.f.knots.size(); ++i)
    out << "f," << pair.f.knots(i) << ',' << pair.f.coefficients(i) << '\n';
  for (Index i = 0; i < pair.h.knots.size(); ++i)
    out << "h," << pair.h.knots(i) << ',' << pair.h.coefficients(i) << '\n';
  atomic_write(out_path, out.str());
  return 0;
}

int cmd_impute(Config& cfg, const std::string& in_path, const std::string& out_path,
               const std::string& summary_path, const std::string& quantiles_path) {
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_long("seed"));
  const PanelDataset d = load_csv(in_path, bounds_from(cfg));
  MintsOptions opt = mints_options_from(cfg);
  opt.run.check(); // validate before any sampling

  std::vector<CellRef> missing_cells;
  for (Index c = 0; c < d.n_countries(); ++c)
    for (Index t = 0; t < d.n_years(); ++t) {
      if (!d.x_mask(c, t)) missing_cells.push_back({0, c, t});
      if (!d.y_mask(c, t)) missing_cells.push_back({1, c, t});
    }
  if (!quantiles_path.empty()) opt.predictive_cells = missing_cells;

  const MintsRun run = run_mints(d, opt);

  // Completed datasets.
  std::ostringstream out;
  out << csv_comment_block(cfg, seed) << "imputation_id,country,year,x,y\n";
  out.precision(12);
  for (std::size_t m = 0; m < run.completed.size(); ++m)
    for (Index c = 0; c < d.n_countries(); ++c)
      for (Index t = 0; t < d.n_years(); ++t)
        out << (m + 1) << ',' << d.country_ids[c] << ',' << d.year_of(t) << ','
            << run.completed[m].x(c, t) << ',' << run.completed[m].y(c, t) << '\n';
  atomic_write(out_path, out.str());

  // Run summary.
  std::ostringstream sum;
  sum << file_header(seed, cfg.hash()) << "\n";
  sum << "estimation_iterations=" << run.convergence.iterations << "\n";
  sum << "converged=" << (run.convergence.converged ? "true" : "false") << "\n";
  sum << "max_psrf=" << run.convergence.max_psrf << "\n";
  for (std::size_t i = 0; i < run.convergence.monitor_names.size(); ++i)
    sum << "psrf." << run.convergence.monitor_names[i] << "=" << run.convergence.psrf[i] << "\n";
  sum << "phi=" << run.tuning.phi << "\n";
  sum << "pilot_acceptance=" << run.pilot_acceptance << "\n";
  sum << "estimation_acceptance=" << run.estimation_acceptance << "\n";
  sum << "m_imputations=" << run.completed.size() << "\n";
  sum << "lag1_autocorr=" << run.lag1_autocorr << "\n";
  sum << "degenerate_y_windows=" << run.degenerate_y_windows << "\n";
  sum << "degenerate_x_windows=" << run.degenerate_x_windows << "\n";
  sum << "prior.delta_X=" << run.cp.delta_X << "\n";
  sum << "prior.nu_drift=" << run.cp.nu_drift << "\n";
  sum << "prior.zeta_drift=" << run.cp.zeta_drift << "\n";
  sum << "prior.delta_drift=" << run.cp.delta_drift << "\n";
  sum << "prior.delta_Y=" << run.cp.delta_Y << "\n";
  sum << "prior.zeta_0=" << run.cp.zeta_0 << "\n";
  sum << "prior.delta_0=" << run.cp.delta_0 << "\n";
  sum << "prior.mu_early_y=" << run.cp.mu_early(0) << "\n";
  sum << "prior.mu_early_x=" << run.cp.mu_early(1) << "\n";
  sum << "prior.sd_early_y=" << run.cp.sd_y_early() << "\n";
  sum << "prior.sd_early_x=" << run.cp.sd_x_early() << "\n";
  sum << "prior.r_early=" << run.cp.r_early << "\n";
  sum << "prior.early_window=" << run.cp.early_lo << ":" << run.cp.early_hi << "\n";
  std::istringstream snap(cfg.snapshot());
  std::string line;
  while (std::getline(snap, line)) sum << "config." << line << "\n";
  atomic_write(summary_path, sum.str());

  if (!quantiles_path.empty()) {
    std::ostringstream q;
    q << csv_comment_block(cfg, seed) << "variable,country,year,q025,q50,q975\n";
    q.precision(12);
    for (std::size_t i = 0; i < missing_cells.size(); ++i) {
      const CellRef& ref = missing_cells[i];
      const auto& draws = run.predictive_draws[i];
      q << (ref.variable == 0 ? 'x' : 'y') << ',' << d.country_ids[ref.c] << ','
        << d.year_of(ref.t) << ',' << empirical_quantile(draws, 0.025) << ','
        << empirical_quantile(draws, 0.5) << ',' << empirical_quantile(draws, 0.975) << '\n';
    }
    atomic_write(quantiles_path, q.str());
  }
  return 0;
}

int cmd_pool(Config& cfg, const std::string& in_path, const std::string& out_path) {
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_long("seed"));
  std::ifstream in(in_path);
  if (!in) throw std::runtime_error("cannot open " + in_path);
  std::string line;
  std::vector<double> qs, us;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true; // imputation_id,estimate,variance
      continue;
    }
    std::stringstream ss(line);
    std::string id, q, u;
    std::getline(ss, id, ',');
    std::getline(ss, q, ',');
    std::getline(ss, u, ',');
    qs.push_back(std::stod(q));
    us.push_back(std::stod(u));
  }
  const Vector qv = Eigen::Map<Vector>(qs.data(), static_cast<Index>(qs.size()));
  const Vector uv = Eigen::Map<Vector>(us.data(), static_cast<Index>(us.size()));
  const PooledEstimate p = pool(qv, uv, cfg.get_double("pool.level"));
  std::ostringstream out;
  out << csv_comment_block(cfg, seed)
      << "q_bar,u_bar,b,t_total,r_m,nu,fmi,ci_low,ci_high,m,fmi_exploratory\n";
  out.precision(12);
  out << p.q_bar << ',' << p.u_bar << ',' << p.b << ',' << p.t_total << ',' << p.r_m << ','
      << p.nu << ',' << p.fmi << ',' << p.ci_low << ',' << p.ci_high << ',' << p.m << ','
      << (p.fmi_exploratory ? "true" : "false") << '\n';
  atomic_write(out_path, out.str());
  return 0;
}

Matrix load_outcome_grid(const std::string& path, const PanelDataset& d, BoolGrid& mask) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::map<std::string, Index> index;
  for (Index c = 0; c < d.n_countries(); ++c) index[d.country_ids[c]] = c;
  Matrix z = Matrix::Zero(d.n_countries(), d.n_years());
  mask = BoolGrid::Constant(d.n_countries(), d.n_years(), false);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::stringstream ss(line);
    std::string country, year, value;
    std::getline(ss, country, ',');
    std::getline(ss, year, ',');
    std::getline(ss, value, ',');
    auto it = index.find(country);
    if (it == index.end()) continue;
    const Index t = std::stoi(year) - d.first_year;
    if (t < 0 || t >= d.n_years() || value.empty()) continue;
    z(it->second, t) = std::stod(value);
    mask(it->second, t) = true;
  }
  return z;
}

int cmd_validate(Config& cfg, const std::string& exercise, const std::string& out_path) {
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_long("seed"));

  PanelDataset d;
  Matrix z;
  BoolGrid z_mask;
  SimConfig sim = cfg.get("data.regime") == "linear" ? SimConfig::linear()
                                                     : SimConfig::nonlinear();
  if (cfg.get("data.path").empty()) {
    sim.n_countries = static_cast<int>(cfg.get_long("data.countries"));
    sim.n_years = static_cast<int>(cfg.get_long("data.years"));
    RngStream rng(seed, 0x5157);
    d = gen_panel(sim, rng);
    RngStream zrng(seed, 0x5158);
    z = gen_outcome_z(d.y_values, sim, zrng);
    z_mask = BoolGrid::Constant(d.n_countries(), d.n_years(), true);
  } else {
    d = load_csv(cfg.get("data.path"), bounds_from(cfg));
    if (!cfg.get("outcome.path").empty()) {
      z = load_outcome_grid(cfg.get("outcome.path"), d, z_mask);
    } else {
      RngStream zrng(seed, 0x5158);
      z = gen_outcome_z(d.y_values, sim, zrng);
      z_mask = BoolGrid::Constant(d.n_countries(), d.n_years(), true);
    }
  }

  ExperimentGrid grid;
  grid.mechanisms.clear();
  for (const auto& name : split_list(cfg.get("grid.mechanisms")))
    grid.mechanisms.push_back(mechanism_from(name));
  grid.rates.clear();
  for (const auto& r : split_list(cfg.get("grid.rates"))) grid.rates.push_back(std::stod(r));
  grid.n_rep = static_cast<int>(cfg.get_long("grid.n_rep"));
  grid.enrollment_noise = cfg.get("ampute.context") == "enrollment";
  grid.analysis.model = cfg.get("analysis.model") == "random-intercept"
                            ? AnalysisModel::RandomIntercept
                            : AnalysisModel::OLS;
  grid.analysis.target = cfg.get("analysis.target") == "ri-variance"
                             ? AnalysisTarget::RandomInterceptVariance
                             : AnalysisTarget::Slope;
  const std::string filt = cfg.get("analysis.filter_min");
  grid.analysis.outcome_filter_min = filt == "-inf" ? -kInf : std::stod(filt);
  grid.analysis.real_data_mode = cfg.get_bool("analysis.real_data");
  grid.mints = mints_options_from(cfg);

  std::ostringstream out;
  out << csv_comment_block(cfg, seed);
  out.precision(10);
  if (exercise == "analysis") {
    const auto rows = run_analysis_validation(d, z, z_mask, grid);
    out << "mechanism,rate,n_rep,n_failed,truth,mae,coverage,fmi,baseline_mae\n";
    for (const auto& r : rows)
      out << mechanism_name(r.mechanism) << ',' << r.rate << ',' << r.n_rep << ','
          << r.n_failed << ',' << r.truth << ',' << r.mae << ',' << r.coverage << ','
          << r.mean_fmi << ',' << r.baseline_mae << '\n';
  } else if (exercise == "oos") {
    const auto rows = run_oos_validation(d, grid);
    out << "mechanism,rate,n_test,mae,coverage,width,interval_score,spline_mae,mean_mae\n";
    for (const auto& r : rows)
      out << mechanism_name(r.mechanism) << ',' << r.rate << ',' << r.n_test << ','
          << r.mints.mae << ',' << r.mints.coverage << ',' << r.mints.mean_width << ','
          << r.mints.interval_score << ',' << r.spline_mae << ',' << r.mean_mae << '\n';
  } else {
    throw std::invalid_argument("validate: exercise must be 'analysis' or 'oos'");
  }
  atomic_write(out_path, out.str());
  return 0;
}

int cmd_fit(const std::string& in_path, const std::string& model) {
  std::ifstream in(in_path);
  if (!in) throw std::runtime_error("cannot open " + in_path);
  std::vector<double> ys, xs;
  std::vector<int> groups;
  std::map<std::string, int> gid;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::stringstream ss(line);
    std::string y, x, g;
    std::getline(ss, y, ',');
    std::getline(ss, x, ',');
    std::getline(ss, g, ',');
    ys.push_back(std::stod(y));
    xs.push_back(std::stod(x));
    groups.push_back(gid.emplace(g, static_cast<int>(gid.size())).first->second);
  }
  const Vector yv = Eigen::Map<Vector>(ys.data(), static_cast<Index>(ys.size()));
  const Vector xv = Eigen::Map<Vector>(xs.data(), static_cast<Index>(xs.size()));
  FitResult f;
  if (model == "ri" || model == "random-intercept")
    f = fit_random_intercept(yv, xv, groups);
  else
    f = fit_ols(yv, xv);
  std::cout.precision(10);
  std::cout << "intercept=" << f.intercept << "\nslope=" << f.slope
            << "\nse_intercept=" << f.se_intercept << "\nse_slope=" << f.se_slope
            << "\nvar_residual=" << f.var_residual
            << "\nvar_random_intercept=" << f.var_random_intercept << "\nn=" << f.n
            << "\nboundary=" << (f.boundary ? "true" : "false") << "\n";
  return 0;
}

int cmd_report(Config& cfg, const std::string& in_path, const std::string& out_path) {
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.get_long("seed"));
  std::ifstream in(in_path);
  if (!in) throw std::runtime_error("cannot open " + in_path);
  // completed CSV: imputation_id,country,year,x,y
  struct CellKey {
    std::string country;
    int year;
    bool operator<(const CellKey& o) const {
      return country < o.country || (country == o.country && year < o.year);
    }
  };
  std::map<CellKey, std::pair<std::vector<double>, std::vector<double>>> cells;
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
    auto& cell = cells[{country, std::stoi(year)}];
    cell.first.push_back(std::stod(x));
    cell.second.push_back(std::stod(y));
  }
  std::ostringstream out;
  out << csv_comment_block(cfg, seed) << "country,year,x_q025,x_q50,x_q975,q025,q50,q975\n";
  out.precision(12);
  for (const auto& [key, xy] : cells)
    out << key.country << ',' << key.year << ',' << empirical_quantile(xy.first, 0.025) << ','
        << empirical_quantile(xy.first, 0.5) << ',' << empirical_quantile(xy.first, 0.975)
        << ',' << empirical_quantile(xy.second, 0.025) << ','
        << empirical_quantile(xy.second, 0.5) << ',' << empirical_quantile(xy.second, 0.975)
        << '\n';
  atomic_write(out_path, out.str());
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"MINTS multiple imputation for bivariate hierarchical time series"};
  app.require_subcommand(1);

  Config cfg;
  register_defaults(cfg);
  std::string config_path;
  app.add_option("--config", config_path, "key = value configuration file");

  // Deferred overrides: flag values are applied on top of the config file.
  std::vector<std::pair<std::string, std::string>> overrides;
  auto bind = [&](CLI::App* sub, const char* flag, const char* key, const char* desc) {
    sub->add_option_function<std::string>(
           flag,
           [&overrides, key](const std::string& v) { overrides.emplace_back(key, v); }, desc)
        ->expected(1);
  };

  std::string out_path, z_path, in_path, manifest_path, summary_path, quantiles_path,
      exercise, fit_model = "ols";

  CLI::App* sim = app.add_subcommand("simulate", "generate a synthetic panel");
  sim->add_option("--out", out_path, "panel CSV")->required();
  sim->add_option("--z-out", z_path, "analysis outcome CSV");
  bind(sim, "--regime", "sim.regime", "nonlinear | linear");
  bind(sim, "--seed", "seed", "master seed");
  bind(sim, "--countries", "sim.countries", "panel height");
  bind(sim, "--years", "sim.years", "panel width");

  CLI::App* amp = app.add_subcommand("ampute", "simulate missingness on a panel");
  amp->add_option("--in", in_path, "input panel CSV")->required();
  amp->add_option("--out", out_path, "training CSV")->required();
  amp->add_option("--manifest", manifest_path, "test manifest CSV");
  bind(amp, "--mechanism", "ampute.mechanism", "mcar | mar | mnar");
  bind(amp, "--rate", "ampute.rate", "fraction to ampute");
  bind(amp, "--seed", "seed", "master seed");
  bind(amp, "--context", "ampute.context", "simulated | enrollment noise defaults");
  bind(amp, "--noise-x", "ampute.noise_x", "override X score noise SD");
  bind(amp, "--noise-y", "ampute.noise_y", "override Y score noise SD");
  bind(amp, "--bounds-cap", "bounds.cap", "Y cap");
  bind(amp, "--x-up", "bounds.x_up", "X upper bound (number or inf)");

  CLI::App* fsp = app.add_subcommand("fit-spline", "fit f and h to the complete cases");
  fsp->add_option("--in", in_path, "input panel CSV")->required();
  fsp->add_option("--out", out_path, "knots/coefficients CSV")->required();
  bind(fsp, "--max-knots", "spline.max_knots", "initial interior knot cap");
  bind(fsp, "--eps", "spline.eps", "dispersion floor");
  bind(fsp, "--bic-grid", "spline.bic_grid", "penalty grid size");
  bind(fsp, "--bounds-cap", "bounds.cap", "Y cap");
  bind(fsp, "--x-up", "bounds.x_up", "X upper bound (number or inf)");

  CLI::App* imp = app.add_subcommand("impute", "run the MCMC and emit completed datasets");
  imp->add_option("--in", in_path, "input panel CSV")->required();
  imp->add_option("--out", out_path, "completed datasets CSV")->required();
  imp->add_option("--summary", summary_path, "run summary key=value file")->required();
  imp->add_option("--quantiles", quantiles_path, "per-cell predictive quantiles CSV");
  bind(imp, "--chains", "impute.chains", "number of MCMC chains");
  bind(imp, "--m", "impute.m", "number of imputations");
  bind(imp, "--thin", "impute.thin", "imputation-phase thinning");
  bind(imp, "--imp-iters", "impute.imp_iters", "imputation-phase iterations per chain");
  bind(imp, "--max-iters", "impute.max_iters", "estimation-phase cap");
  bind(imp, "--block", "impute.block", "estimation block size between PSRF checks");
  bind(imp, "--psrf-threshold", "impute.psrf_threshold", "convergence gate");
  bind(imp, "--pilot-iters", "impute.pilot_iters", "pilot length for phi tuning");
  bind(imp, "--seed", "seed", "master seed");
  bind(imp, "--jobs", "jobs", "parallel chain workers (0 = hardware)");
  bind(imp, "--bounds-cap", "bounds.cap", "Y cap in min(X, cap)");
  bind(imp, "--x-up", "bounds.x_up", "X upper bound (number or inf)");
  bind(imp, "--early-window", "prior.early_window", "calendar years lo:hi");
  bind(imp, "--pool-all", "impute.pool_all", "pool every imputation iteration");

  CLI::App* pol = app.add_subcommand("pool", "Rubin-pool per-imputation estimates");
  pol->add_option("--in", in_path, "CSV imputation_id,estimate,variance")->required();
  pol->add_option("--out", out_path, "pooled one-row CSV")->required();
  bind(pol, "--level", "pool.level", "confidence level");

  CLI::App* val = app.add_subcommand("validate", "run a validation exercise");
  val->add_option("--exercise", exercise, "analysis | oos")->required();
  val->add_option("--grid", config_path, "grid configuration file");
  val->add_option("--out", out_path, "report CSV")->required();
  bind(val, "--seed", "seed", "master seed");
  bind(val, "--jobs", "jobs", "parallel workers");

  CLI::App* fit = app.add_subcommand("fit", "debug fit on a 3-column CSV (y,x,group)");
  fit->add_option("--in", in_path, "input CSV")->required();
  fit->add_option("--model", fit_model, "ols | ri");

  CLI::App* rep = app.add_subcommand("report", "per-cell quantiles from completed datasets");
  rep->add_option("--in", in_path, "completed datasets CSV")->required();
  rep->add_option("--out", out_path, "quantiles CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) cfg.load_file(config_path);
    for (const auto& [key, value] : overrides) {
      if (key == std::string("prior.early_window")) {
        const auto colon = value.find(':');
        if (colon == std::string::npos)
          throw std::invalid_argument("--early-window expects lo:hi");
        cfg.set_override("prior.early_lo", value.substr(0, colon));
        cfg.set_override("prior.early_hi", value.substr(colon + 1));
      } else {
        cfg.set_override(key, value);
      }
    }

    if (sim->parsed()) return cmd_simulate(cfg, out_path, z_path);
    if (amp->parsed()) return cmd_ampute(cfg, in_path, out_path, manifest_path);
    if (fsp->parsed()) return cmd_fit_spline(cfg, in_path, out_path);
    if (imp->parsed()) return cmd_impute(cfg, in_path, out_path, summary_path, quantiles_path);
    if (pol->parsed()) return cmd_pool(cfg, in_path, out_path);
    if (val->parsed()) return cmd_validate(cfg, exercise, out_path);
    if (fit->parsed()) return cmd_fit(in_path, fit_model);
    if (rep->parsed()) return cmd_report(cfg, in_path, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
