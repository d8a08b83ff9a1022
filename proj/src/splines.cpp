#include "mints/splines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace mints {

namespace {

void check_knots(const Vector& knots) {
  if (knots.size() < 2) throw std::domain_error("spline: need at least 2 knots");
  for (Index i = 1; i < knots.size(); ++i)
    if (!(knots(i) > knots(i - 1))) throw std::domain_error("spline: knots must be strictly increasing");
}

// Index of the interval [knots(i), knots(i+1)) containing x (clamped).
Index interval_of(const Vector& knots, double x) {
  const Index m = knots.size();
  if (x <= knots(0)) return 0;
  if (x >= knots(m - 1)) return m - 2;
  Index lo = 0, hi = m - 1;
  while (hi - lo > 1) {
    const Index mid = (lo + hi) / 2;
    if (knots(mid) <= x)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

// Design matrix of hat-basis weights, one row per observation.
Matrix design_matrix(const Vector& knots, const Vector& xs) {
  Matrix B = Matrix::Zero(xs.size(), knots.size());
  for (Index r = 0; r < xs.size(); ++r) {
    const double x = xs(r);
    if (x <= knots(0)) {
      B(r, 0) = 1.0;
      continue;
    }
    if (x >= knots(knots.size() - 1)) {
      B(r, knots.size() - 1) = 1.0;
      continue;
    }
    const Index i = interval_of(knots, x);
    const double w = (x - knots(i)) / (knots(i + 1) - knots(i));
    B(r, i) = 1.0 - w;
    B(r, i + 1) = w;
  }
  return B;
}

// Rows measure the slope change at each interior knot: zero rows mean the
// coefficient triple is collinear, so the knot is inactive even when the
// knot spacing is uneven.
Matrix slope_change_matrix(const Vector& knots) {
  const Index m = knots.size();
  Matrix D = Matrix::Zero(std::max<Index>(m - 2, 0), m);
  for (Index j = 1; j + 1 < m; ++j) {
    const double hl = knots(j) - knots(j - 1);
    const double hr = knots(j + 1) - knots(j);
    D(j - 1, j - 1) = 1.0 / hl;
    D(j - 1, j) = -1.0 / hl - 1.0 / hr;
    D(j - 1, j + 1) = 1.0 / hr;
  }
  return D;
}

struct Refit {
  Vector knots;
  Vector coef;
  double rss = kInf;
  double bic = kInf;
};

Refit refit_on(const Vector& knots, const Vector& xs, const Vector& ys) {
  Refit out;
  out.knots = knots;
  const Matrix B = design_matrix(knots, xs);
  out.coef = B.colPivHouseholderQr().solve(ys);
  out.rss = (ys - B * out.coef).squaredNorm();
  const double n = static_cast<double>(xs.size());
  out.bic = n * std::log(std::max(out.rss, 1e-300) / n) +
            static_cast<double>(knots.size()) * std::log(n);
  return out;
}

} // namespace

Vector bspline_basis_deg1(const Vector& knots, double x) {
  check_knots(knots);
  Vector w = Vector::Zero(knots.size());
  if (x <= knots(0)) {
    w(0) = 1.0;
    return w;
  }
  if (x >= knots(knots.size() - 1)) {
    w(knots.size() - 1) = 1.0;
    return w;
  }
  const Index i = interval_of(knots, x);
  const double u = (x - knots(i)) / (knots(i + 1) - knots(i));
  w(i) = 1.0 - u;
  w(i + 1) = u;
  return w;
}

double evaluate(const LinearSpline& s, double x) {
  const Index m = s.knots.size();
  double v;
  if (x <= s.knots(0))
    v = s.coefficients(0);
  else if (x >= s.knots(m - 1))
    v = s.coefficients(m - 1);
  else {
    const Index i = interval_of(s.knots, x);
    const double u = (x - s.knots(i)) / (s.knots(i + 1) - s.knots(i));
    v = (1.0 - u) * s.coefficients(i) + u * s.coefficients(i + 1);
  }
  return std::min(std::max(v, s.clip_lo), s.clip_hi);
}

LinearSpline fit_adaptive_spline(const Vector& xs_raw, const Vector& ys_raw,
                                 const AsplineConfig& config) {
  const Index n = xs_raw.size();
  if (n != ys_raw.size()) throw std::invalid_argument("fit_adaptive_spline: length mismatch");
  if (n < 4) throw std::invalid_argument("fit_adaptive_spline: need at least 4 points");
  const double x_min = xs_raw.minCoeff(), x_max = xs_raw.maxCoeff();
  if (!(x_max > x_min)) throw std::invalid_argument("fit_adaptive_spline: x values all equal");

  // Standardize both axes so the penalty grid and the reweighting floor
  // are scale-free.
  const double x_scale = x_max - x_min;
  const double y_mean = ys_raw.mean();
  double y_sd = std::sqrt((ys_raw.array() - y_mean).square().sum() / static_cast<double>(n - 1));
  if (!(y_sd > 0.0)) y_sd = 1.0;
  const Vector xs = (xs_raw.array() - x_min) / x_scale;
  const Vector ys = (ys_raw.array() - y_mean) / y_sd;

  // Candidate interior knots at equally spaced x-quantiles, deduplicated.
  std::vector<double> sorted(xs.data(), xs.data() + n);
  std::sort(sorted.begin(), sorted.end());
  const int want = std::min(config.max_knots, static_cast<int>(n / 4));
  std::vector<double> interior;
  for (int j = 1; j <= want; ++j) {
    const double p = static_cast<double>(j) / (want + 1);
    const double q = sorted[static_cast<std::size_t>(p * (n - 1))];
    if (q > 0.0 && q < 1.0 && (interior.empty() || q > interior.back() + 1e-12))
      interior.push_back(q);
  }

  std::vector<double> kv;
  kv.push_back(0.0);
  kv.insert(kv.end(), interior.begin(), interior.end());
  kv.push_back(1.0);
  const Vector knots = Eigen::Map<Vector>(kv.data(), static_cast<Index>(kv.size()));
  const Index m = knots.size();

  const Matrix B = design_matrix(knots, xs);
  const Matrix BtB = B.transpose() * B;
  const Vector Bty = B.transpose() * ys;
  const Matrix D = slope_change_matrix(knots);
  const Index nd = D.rows();

  // Zero-interior-knot fit is always a candidate, so the result can never
  // lose to plain linear regression.
  Vector boundary(2);
  boundary << 0.0, 1.0;
  Refit best = refit_on(boundary, xs, ys);

  if (nd > 0) {
    for (int gi = config.bic_grid - 1; gi >= 0; --gi) {
      const double frac = config.bic_grid == 1
                              ? 0.0
                              : static_cast<double>(gi) / (config.bic_grid - 1);
      const double lambda =
          std::exp(std::log(config.lambda_min) +
                   frac * (std::log(config.lambda_max) - std::log(config.lambda_min)));

      Vector w = Vector::Ones(nd);
      Vector coef = Vector::Zero(m);
      for (int it = 0; it < config.ridge_iters; ++it) {
        Matrix P = BtB;
        for (Index k = 0; k < nd; ++k) P += lambda * w(k) * (D.row(k).transpose() * D.row(k));
        const Vector next = P.ldlt().solve(Bty);
        const double rel = (next - coef).norm() / (coef.norm() + 1e-12);
        coef = next;
        const Vector d = D * coef;
        for (Index k = 0; k < nd; ++k) w(k) = 1.0 / (d(k) * d(k) + 1e-8);
        if (rel < config.ridge_tol && it > 0) break;
      }

      // Retained knots: slope changes the ridge did not drive to zero.
      const Vector d = D * coef;
      std::vector<double> keep;
      keep.push_back(0.0);
      for (Index k = 0; k < nd; ++k)
        if (w(k) * d(k) * d(k) > 0.99) keep.push_back(knots(k + 1));
      keep.push_back(1.0);
      const Vector sub = Eigen::Map<Vector>(keep.data(), static_cast<Index>(keep.size()));
      const Refit cand = refit_on(sub, xs, ys);
      if (cand.bic < best.bic) best = cand;
    }
  }

  LinearSpline out;
  out.knots = (best.knots.array() * x_scale + x_min).matrix();
  out.coefficients = (best.coef.array() * y_sd + y_mean).matrix();
  return out;
}

SplinePair estimate_f_h(const Vector& xs, const Vector& ys, double y_lo, double y_hi,
                        double eps, const AsplineConfig& config) {
  if (!(eps > 0.0)) throw std::invalid_argument("estimate_f_h: eps must be positive");
  const Index n = xs.size();
  SplinePair pair;

  const double x_min = n > 0 ? xs.minCoeff() : 0.0;
  const double x_max = n > 0 ? xs.maxCoeff() : 1.0;

  auto constant_spline = [&](double value) {
    LinearSpline s;
    s.knots.resize(2);
    const double pad = (x_max > x_min) ? 0.0 : 0.5;
    s.knots << x_min - pad, x_max + pad;
    s.coefficients = Vector::Constant(2, value);
    return s;
  };

  if (n < 4 || !(x_max > x_min)) {
    // Fallback: ordinary line (or constant), constant dispersion.
    if (n >= 2 && x_max > x_min) {
      const double xm = xs.mean(), ym = ys.mean();
      const double sxx = (xs.array() - xm).square().sum();
      const double slope = ((xs.array() - xm) * (ys.array() - ym)).sum() / sxx;
      LinearSpline f;
      f.knots.resize(2);
      f.knots << x_min, x_max;
      f.coefficients.resize(2);
      f.coefficients << ym + slope * (x_min - xm), ym + slope * (x_max - xm);
      pair.f = f;
    } else {
      pair.f = constant_spline(n > 0 ? ys.mean() : 0.5 * (y_lo + std::min(y_hi, 1.0)));
    }
    pair.f.clip_lo = y_lo;
    pair.f.clip_hi = y_hi;
    double sd = eps;
    if (n >= 2) {
      double ss = 0.0;
      for (Index i = 0; i < n; ++i) {
        const double r = ys(i) - evaluate(pair.f, xs(i));
        ss += r * r;
      }
      sd = std::sqrt(ss / static_cast<double>(n - 1));
    }
    pair.h = constant_spline(std::max(sd, eps));
    pair.h.clip_lo = eps;
    return pair;
  }

  pair.f = fit_adaptive_spline(xs, ys, config);
  pair.f.clip_lo = y_lo;
  pair.f.clip_hi = y_hi;

  Vector abs_res(n);
  for (Index i = 0; i < n; ++i) abs_res(i) = std::abs(ys(i) - evaluate(pair.f, xs(i)));
  pair.h = fit_adaptive_spline(xs, abs_res, config);
  pair.h.clip_lo = eps;
  return pair;
}

} // namespace mints
