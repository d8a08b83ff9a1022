#include <doctest.h>

#include <cmath>

#include "mints/math.hpp"
#include "mints/types.hpp"

using namespace mints;

TEST_SUITE_BEGIN("math");

TEST_CASE("normal cdf and quantile invert each other") {
  for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-9}) {
    const double x = norm_quantile(p);
    CHECK(norm_cdf(x) == doctest::Approx(p).epsilon(1e-9));
  }
  CHECK(norm_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(norm_quantile(0.5) == doctest::Approx(0.0));
}

TEST_CASE("student-t quantiles match reference values") {
  // Reference values computed independently (scipy.stats.t.ppf).
  CHECK(t_quantile(0.975, 1.0) == doctest::Approx(12.7062047364).epsilon(1e-8));
  CHECK(t_quantile(0.975, 2.0) == doctest::Approx(4.3026527297).epsilon(1e-8));
  CHECK(t_quantile(0.975, 3.78125) == doctest::Approx(2.8409525699).epsilon(1e-8));
  CHECK(t_quantile(0.975, 10.0) == doctest::Approx(2.2281388520).epsilon(1e-8));
  CHECK(t_quantile(0.975, 120.0) == doctest::Approx(1.9799304051).epsilon(1e-8));
  CHECK(t_quantile(0.975, kInf) == doctest::Approx(1.959963984540054).epsilon(1e-10));
  CHECK(t_quantile(0.025, 10.0) == doctest::Approx(-2.2281388520).epsilon(1e-8));
}

TEST_CASE("t cdf is monotone and symmetric") {
  for (double nu : {1.0, 3.5, 25.0}) {
    CHECK(t_cdf(0.0, nu) == doctest::Approx(0.5));
    CHECK(t_cdf(1.3, nu) + t_cdf(-1.3, nu) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t_cdf(2.0, nu) > t_cdf(1.0, nu));
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS((void)norm_quantile(-0.1), std::domain_error);
  CHECK_THROWS_AS((void)t_quantile(0.975, -1.0), std::domain_error);
  CHECK_THROWS_AS((void)inc_beta(-1.0, 1.0, 0.5), std::domain_error);
}

TEST_SUITE_END();
