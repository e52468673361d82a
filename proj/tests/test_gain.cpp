#include "saem/gain.hpp"

#include <doctest.h>

#include <cmath>

using namespace saem;

TEST_CASE("polynomial schedule values") {
  const GainSchedule s = GainSchedule::polynomial(1.0, 1.0);
  CHECK(s.gamma(4) == 0.25);
  CHECK(s.gamma(1) == 1.0);
  CHECK(s.gamma(1000) == doctest::Approx(1e-3));
}

TEST_CASE("polynomial clamps to one") {
  const GainSchedule s = GainSchedule::polynomial(2.0, 0.8);
  CHECK(s.gamma(1) == 1.0);  // c * 1 = 2, clamped
  CHECK(s.gamma(2) < 1.0);
}

TEST_CASE("constant-then-decay boundary") {
  const GainSchedule s = GainSchedule::constant_then_decay(50, 0.7);
  CHECK(s.gamma(1) == 1.0);
  CHECK(s.gamma(50) == 1.0);
  CHECK(s.gamma(51) == 1.0);  // (51-50)^-0.7
  CHECK(s.gamma(52) == doctest::Approx(std::pow(2.0, -0.7)));
}

TEST_CASE("condition report accepts valid exponents and rejects invalid ones") {
  for (double alpha : {0.6, 0.8, 1.0}) {
    const auto r = check_conditions(GainSchedule::constant_then_decay(10, alpha));
    CHECK(r.all_pass());
  }
  // alpha = 0.4: sum gamma^2 = sum i^-0.8 diverges.
  const auto low = check_conditions(GainSchedule::polynomial(1.0, 0.4));
  CHECK(low.range_ok);
  CHECK(low.sum_diverges);
  CHECK_FALSE(low.sum_sq_converges);
  CHECK_FALSE(low.all_pass());
  // alpha = 1.2: sum gamma converges.
  const auto high = check_conditions(GainSchedule::polynomial(1.0, 1.2));
  CHECK(high.range_ok);
  CHECK_FALSE(high.sum_diverges);
  CHECK(high.sum_sq_converges);
  CHECK_FALSE(high.all_pass());
}

TEST_CASE("gamma stays in [0,1] and is non-increasing after burn-in") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const double alpha = 0.51 + 0.49 * rng.uniform();
    const auto kind = (trial % 2 == 0) ? GainSchedule::constant_then_decay(
                                             static_cast<std::int64_t>(rng.below(300)), alpha)
                                       : GainSchedule::polynomial(0.1 + 3.0 * rng.uniform(),
                                                                  alpha);
    double prev = 1.0;
    for (std::int64_t i = 1; i <= 2000; ++i) {
      const double g = kind.gamma(i);
      CHECK(g >= 0.0);
      CHECK(g <= 1.0);
      if (i > kind.burn_in() + 1) CHECK(g <= prev);
      if (i > kind.burn_in()) prev = g;
    }
  }
}

TEST_CASE("gamma is pure") {
  const GainSchedule s = GainSchedule::polynomial(1.7, 0.8);
  for (std::int64_t i : {1, 2, 17, 4096}) {
    CHECK(s.gamma(i) == s.gamma(i));
    const double first = s.gamma(i);
    CHECK(s.gamma(i) == first);
  }
}

TEST_CASE("structurally invalid schedules are rejected at construction") {
  CHECK_THROWS_AS(GainSchedule::polynomial(0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(GainSchedule::polynomial(-1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(GainSchedule::polynomial(1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(GainSchedule::constant_then_decay(-1, 1.0), ConfigError);
  CHECK_THROWS_AS(GainSchedule::constant_then_decay(10, -0.5), ConfigError);
}
