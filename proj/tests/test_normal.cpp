#include "saem/normal.hpp"

#include <doctest.h>

#include <cmath>

using namespace saem;

TEST_CASE("quantile inverts the cdf across the full range") {
  for (double lp = -280.0; lp <= -1.0; lp += 3.7) {
    const double p = std::exp(lp);
    const double z = norm_quantile(p);
    CHECK(norm_cdf(z) == doctest::Approx(p).epsilon(1e-12));
    // symmetry
    CHECK(norm_quantile(1.0 - p) == doctest::Approx(-z).epsilon(1e-12));
  }
  for (double p = 0.05; p < 1.0; p += 0.05) {
    CHECK(norm_cdf(norm_quantile(p)) == doctest::Approx(p).epsilon(1e-14));
  }
}

TEST_CASE("quantile reference values") {
  CHECK(norm_quantile(0.5) == 0.0);
  CHECK(norm_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
  CHECK(norm_quantile(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-14));
}

TEST_CASE("log survival matches direct computation and stays finite far out") {
  for (double z = -5.0; z <= 25.0; z += 0.5) {
    CHECK(norm_logsf(z) == doctest::Approx(std::log(norm_sf(z))).epsilon(1e-12));
  }
  CHECK(std::isfinite(norm_logsf(100.0)));
  CHECK(norm_logsf(100.0) < -5000.0);
}

TEST_CASE("truncated normal moments: standard half-normal") {
  // E[Z | Z > 0] = sqrt(2/pi), Var = 1 - 2/pi.
  const TruncatedMoments m = truncated_normal_lower_moments(0.0, 1.0, 0.0);
  CHECK(m.mean == doctest::Approx(0.7978845608028654).epsilon(1e-14));
  CHECK(m.var == doctest::Approx(1.0 - 2.0 / M_PI).epsilon(1e-13));
}

TEST_CASE("truncated normal moments: far tail stays sane") {
  const TruncatedMoments m = truncated_normal_lower_moments(0.0, 1.0, 35.0);
  CHECK(m.mean > 35.0);
  CHECK(m.mean < 35.1);
  CHECK(m.var > 0.0);
  CHECK(m.var < 1e-2);
}

TEST_CASE("truncated normal sampler matches exact moments") {
  Rng rng(2024);
  const double mu = -0.5, sigma = 1.5, a = 0.7;
  const TruncatedMoments exact = truncated_normal_lower_moments(mu, sigma, a);
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0, min_draw = 1e300;
  for (int i = 0; i < n; ++i) {
    const double z = sample_truncated_normal_lower(mu, sigma, a, rng);
    s1 += z;
    s2 += z * z;
    min_draw = std::min(min_draw, z);
  }
  const double mean = s1 / n;
  const double var = s2 / n - mean * mean;
  CHECK(min_draw >= a);
  CHECK(mean == doctest::Approx(exact.mean).epsilon(0.01));
  CHECK(var == doctest::Approx(exact.var).epsilon(0.05));
}
