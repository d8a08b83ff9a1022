#include <doctest.h>

#include <cmath>

#include "mints/pooling.hpp"
#include "mints/rng.hpp"
#include "oracle.hpp"

using namespace mints;

TEST_SUITE_BEGIN("pooling");

TEST_CASE("hand-derived oracle for three imputations") {
  const Vector q = (Vector(3) << 1, 2, 3).finished();
  const Vector u = Vector::Constant(3, 0.5);
  const PooledEstimate p = pool(q, u, 0.95);
  CHECK(p.q_bar == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(p.u_bar == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p.b == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.t_total == doctest::Approx(1.8333333333).epsilon(1e-9));
  CHECK(p.r_m == doctest::Approx(2.6666666667).epsilon(1e-9));
  CHECK(p.nu == doctest::Approx(3.78125).epsilon(1e-9));
  CHECK(p.fmi == doctest::Approx(0.8077084206).epsilon(1e-9));
  // CI uses t* at nu = 3.78125 (2.84095 from an independent computation).
  CHECK(p.ci_low == doctest::Approx(2.0 - 2.8409525699 * std::sqrt(1.8333333333)).epsilon(1e-7));
  CHECK(p.ci_high == doctest::Approx(2.0 + 2.8409525699 * std::sqrt(1.8333333333)).epsilon(1e-7));
  CHECK(p.fmi_exploratory);
}

TEST_CASE("identical estimates collapse to the normal-limit interval") {
  const Vector q = Vector::Constant(4, 1.5);
  const Vector u = Vector::Constant(4, 0.25);
  const PooledEstimate p = pool(q, u, 0.95);
  CHECK(p.zero_between);
  CHECK(p.b == 0.0);
  CHECK(p.t_total == doctest::Approx(0.25));
  CHECK(std::isinf(p.nu));
  CHECK(p.fmi == 0.0);
  CHECK(p.ci_low == doctest::Approx(1.5 - 1.959963984540054 * 0.5).epsilon(1e-10));
  CHECK(p.ci_high == doctest::Approx(1.5 + 1.959963984540054 * 0.5).epsilon(1e-10));
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS((void)pool(Vector::Constant(1, 1.0), Vector::Constant(1, 1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)pool((Vector(2) << 1, 2).finished(),
                             (Vector(2) << -0.1, 0.2).finished()),
                  std::invalid_argument);
}

TEST_CASE("location-scale equivariance") {
  RngStream rng(14);
  Vector q(7), u(7);
  for (int i = 0; i < 7; ++i) {
    q(i) = rng.normal(3.0, 2.0);
    u(i) = 0.5 + rng.uniform();
  }
  const double a = -2.5, c = 4.0;
  const PooledEstimate p1 = pool(q, u);
  const PooledEstimate p2 = pool((a * q.array() + c).matrix(), (a * a * u.array()).matrix());
  CHECK(p2.q_bar == doctest::Approx(a * p1.q_bar + c).epsilon(1e-10));
  CHECK(p2.t_total == doctest::Approx(a * a * p1.t_total).epsilon(1e-10));
  CHECK(p2.r_m == doctest::Approx(p1.r_m).epsilon(1e-10));
  CHECK(p2.nu == doctest::Approx(p1.nu).epsilon(1e-10));
  CHECK(p2.fmi == doctest::Approx(p1.fmi).epsilon(1e-10));
}

TEST_CASE("permutation invariance over imputations") {
  Vector q = (Vector(5) << 3, 1, 4, 1, 5).finished();
  Vector u = (Vector(5) << .2, .3, .1, .5, .4).finished();
  const PooledEstimate p1 = pool(q, u);
  Vector qp = (Vector(5) << 5, 1, 1, 4, 3).finished();
  Vector up = (Vector(5) << .4, .5, .3, .1, .2).finished();
  const PooledEstimate p2 = pool(qp, up);
  CHECK(p1.q_bar == doctest::Approx(p2.q_bar));
  CHECK(p1.t_total == doctest::Approx(p2.t_total));
  CHECK(p1.fmi == doctest::Approx(p2.fmi));
}

TEST_CASE("fmi increases with the relative variance increase") {
  // Fix M (hence the r -> nu map) and sweep b upward.
  double last_fmi = -1.0;
  for (double b : {0.1, 0.5, 1.0, 2.0, 5.0, 20.0}) {
    Vector q(4);
    const double s = std::sqrt(b);
    q << -1.5 * s, -0.5 * s, 0.5 * s, 1.5 * s; // sample variance = 5b/3
    const PooledEstimate p = pool(q, Vector::Constant(4, 1.0));
    CHECK(p.fmi > last_fmi);
    last_fmi = p.fmi;
  }
}

TEST_CASE("monte carlo validity of the combining rules in a congenial setting") {
  // True mean 10, within-variance known: each imputation observes the
  // complete-data estimator plus imputation noise, the textbook setting
  // where T = U + (1 + 1/M) B is a valid variance estimate.
  RngStream rng(2718);
  const int n_rep = 500, m = 40;
  int covered = 0;
  for (int rep = 0; rep < n_rep; ++rep) {
    const double complete_mean = 10.0 + rng.normal(0.0, 0.04); // U = 0.04
    Vector q(m), u(m);
    for (int i = 0; i < m; ++i) {
      q(i) = complete_mean + rng.normal(0.0, 0.01); // B ~ 0.01
      u(i) = 0.04 + 0.01;
    }
    const PooledEstimate p = pool(q, u);
    if (10.0 >= p.ci_low && 10.0 <= p.ci_high) ++covered;
  }
  const double cov = static_cast<double>(covered) / n_rep;
  CHECK(cov >= 0.92);
  CHECK(cov <= 0.995);
}

TEST_SUITE_END();
