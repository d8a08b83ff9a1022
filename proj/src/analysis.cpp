#include "mints/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace mints {

FitResult fit_ols(const Vector& y, const Vector& x) {
  const Index n = y.size();
  if (x.size() != n) throw std::invalid_argument("fit_ols: length mismatch");
  if (n < 3) throw std::invalid_argument("fit_ols: need at least 3 observations");
  const double xm = x.mean(), ym = y.mean();
  const double sxx = (x.array() - xm).square().sum();
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_ols: predictor is constant");
  const double sxy = ((x.array() - xm) * (y.array() - ym)).sum();

  FitResult r;
  r.n = n;
  r.slope = sxy / sxx;
  r.intercept = ym - r.slope * xm;
  const double rss = (y.array() - r.intercept - r.slope * x.array()).square().sum();
  r.var_residual = rss / static_cast<double>(n - 2);
  r.se_slope = std::sqrt(r.var_residual / sxx);
  r.se_intercept = std::sqrt(r.var_residual * (1.0 / static_cast<double>(n) + xm * xm / sxx));
  return r;
}

namespace {

struct GroupSums {
  double n = 0.0;
  double sx = 0.0, sy = 0.0;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
};

struct RemlData {
  std::vector<GroupSums> groups;
  Index n = 0;
};

RemlData summarize(const Vector& y, const Vector& x, const std::vector<int>& groups) {
  if (x.size() != y.size() || static_cast<Index>(groups.size()) != y.size())
    throw std::invalid_argument("fit_random_intercept: length mismatch");
  std::map<int, GroupSums> by_id;
  for (Index i = 0; i < y.size(); ++i) {
    GroupSums& g = by_id[groups[i]];
    g.n += 1.0;
    g.sx += x(i);
    g.sy += y(i);
    g.sxx += x(i) * x(i);
    g.sxy += x(i) * y(i);
    g.syy += y(i) * y(i);
  }
  RemlData d;
  d.n = y.size();
  for (auto& [id, g] : by_id) d.groups.push_back(g);
  if (d.groups.size() < 2)
    throw std::invalid_argument("fit_random_intercept: need at least 2 groups");
  bool any_multi = false;
  for (const auto& g : d.groups) any_multi = any_multi || g.n >= 2.0;
  if (!any_multi)
    throw std::invalid_argument("fit_random_intercept: need a group with >= 2 observations");
  return d;
}

struct GlsFit {
  Matrix2 a;          // X' V^-1 X
  Vector2 coef;       // (intercept, slope)
  double rss = 0.0;   // r' V^-1 r
  double logdet_v = 0.0;
};

// GLS on the compressed per-group sums. V_g^{-1} = I - theta/(1+theta n_g) J.
GlsFit gls_at(const RemlData& d, double theta) {
  GlsFit f;
  Matrix2 a = Matrix2::Zero();
  Vector2 b = Vector2::Zero();
  for (const auto& g : d.groups) {
    const double w = theta / (1.0 + theta * g.n);
    a(0, 0) += g.n - w * g.n * g.n;
    a(0, 1) += g.sx - w * g.n * g.sx;
    a(1, 1) += g.sxx - w * g.sx * g.sx;
    b(0) += g.sy - w * g.n * g.sy;
    b(1) += g.sxy - w * g.sx * g.sy;
    f.logdet_v += std::log(1.0 + theta * g.n);
  }
  a(1, 0) = a(0, 1);
  f.a = a;
  const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  if (!(det > 0.0)) throw std::invalid_argument("fit_random_intercept: rank-deficient design");
  f.coef(0) = (a(1, 1) * b(0) - a(0, 1) * b(1)) / det;
  f.coef(1) = (a(0, 0) * b(1) - a(0, 1) * b(0)) / det;

  double rss = 0.0;
  for (const auto& g : d.groups) {
    const double w = theta / (1.0 + theta * g.n);
    // r' r and (sum r)^2 from the sufficient statistics.
    const double b0 = f.coef(0), b1 = f.coef(1);
    const double rr = g.syy - 2.0 * b0 * g.sy - 2.0 * b1 * g.sxy + b0 * b0 * g.n +
                      2.0 * b0 * b1 * g.sx + b1 * b1 * g.sxx;
    const double rsum = g.sy - b0 * g.n - b1 * g.sx;
    rss += rr - w * rsum * rsum;
  }
  f.rss = std::max(rss, 0.0);
  return f;
}

double profile_from(const RemlData& d, double theta) {
  const GlsFit f = gls_at(d, theta);
  const double dof = static_cast<double>(d.n) - 2.0;
  const double sigma2 = std::max(f.rss / dof, 1e-300);
  const double logdet_a = std::log(f.a(0, 0) * f.a(1, 1) - f.a(0, 1) * f.a(1, 0));
  return -0.5 * (dof * std::log(sigma2) + f.logdet_v + logdet_a);
}

} // namespace

double reml_profile(const Vector& y, const Vector& x, const std::vector<int>& groups,
                    double theta) {
  return profile_from(summarize(y, x, groups), theta);
}

FitResult fit_random_intercept(const Vector& y, const Vector& x,
                               const std::vector<int>& groups) {
  const RemlData d = summarize(y, x, groups);
  if (d.n < 4) throw std::invalid_argument("fit_random_intercept: need at least 4 observations");

  constexpr double theta_lo = 1e-8, theta_hi = 1e4;

  // Coarse bracket scan, then golden-section on log(theta + 1e-8).
  constexpr int n_scan = 64;
  double best_theta = theta_lo, best_val = -kInf;
  for (int i = 0; i < n_scan; ++i) {
    const double t = std::exp(std::log(theta_lo) +
                              (std::log(theta_hi) - std::log(theta_lo)) * i / (n_scan - 1.0));
    const double v = profile_from(d, t);
    if (v > best_val) {
      best_val = v;
      best_theta = t;
    }
  }
  auto to_log = [](double t) { return std::log(t + 1e-8); };
  auto from_log = [](double u) { return std::max(std::exp(u) - 1e-8, 1e-8); };
  const double step = (std::log(theta_hi) - std::log(theta_lo)) / (n_scan - 1.0);
  double lo = to_log(std::max(best_theta * std::exp(-step), theta_lo));
  double hi = to_log(std::min(best_theta * std::exp(step), theta_hi));
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c1 = hi - gr * (hi - lo), c2 = lo + gr * (hi - lo);
  double f1 = profile_from(d, from_log(c1)), f2 = profile_from(d, from_log(c2));
  while (hi - lo > 1e-8) {
    if (f1 < f2) {
      lo = c1;
      c1 = c2;
      f1 = f2;
      c2 = lo + gr * (hi - lo);
      f2 = profile_from(d, from_log(c2));
    } else {
      hi = c2;
      c2 = c1;
      f2 = f1;
      c1 = hi - gr * (hi - lo);
      f1 = profile_from(d, from_log(c1));
    }
  }
  double theta = from_log(0.5 * (lo + hi));
  if (profile_from(d, theta_lo) >= profile_from(d, theta)) theta = theta_lo;

  FitResult r;
  r.n = d.n;
  r.boundary = theta <= 2e-8;
  if (r.boundary) theta = 0.0;

  const GlsFit f = gls_at(d, theta);
  const double dof = static_cast<double>(d.n) - 2.0;
  r.var_residual = f.rss / dof;
  r.var_random_intercept = theta * r.var_residual;
  r.intercept = f.coef(0);
  r.slope = f.coef(1);
  const Matrix2 cov = r.var_residual * f.a.inverse();
  r.se_intercept = std::sqrt(cov(0, 0));
  r.se_slope = std::sqrt(cov(1, 1));
  return r;
}

} // namespace mints
