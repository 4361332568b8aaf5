#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nobs/errors.hpp"
#include "nobs/gains.hpp"

using namespace nobs;

// Reference values computed with a 40-digit arbitrary-precision evaluation
// of the closed forms, rounded to double.

TEST_CASE("exponential gain matches high-precision reference samples") {
  const double a = 4.0, b = 2.0, eps = 1.0;
  CHECK(gain_exponential(0.0, a, b, eps) == 0.0);
  CHECK(gain_exponential(0.25, a, b, eps) ==
        doctest::Approx(56.299850034351104448).epsilon(1e-14));
  CHECK(gain_exponential(0.5, a, b, eps) ==
        doctest::Approx(102.24512667470581172).epsilon(1e-14));
  // With alpha = 2*beta the x=1 value collapses to 2*eps*alpha^2*tanh(beta)^2.
  CHECK(gain_exponential(1.0, a, b, eps) ==
        doctest::Approx(29.739173604698737098).epsilon(1e-14));
  CHECK(gain_exponential(1.0, a, b, eps) ==
        doctest::Approx(32.0 * std::tanh(2.0) * std::tanh(2.0)).epsilon(1e-14));
}

TEST_CASE("sampled exponential gain lines up with pointwise evaluation") {
  Grid g(11, 0.1, 1, 0.01);
  auto gain = ExponentialGain::sample(4.0, 2.0, 1.0, g);
  REQUIRE(gain.sampled.size() == 11);
  for (int i = 0; i < 11; ++i)
    CHECK(gain.sampled[i] == gain_exponential(g.x(i), 4.0, 2.0, 1.0));
}

TEST_CASE("prescribed-time gain matches high-precision series references") {
  PrescribedTimeGain cfg(0.6, 1.0, 8, 0.594);
  CHECK(gain_prescribed_time(0.0, 0.2, cfg) == 0.0);
  CHECK(gain_prescribed_time(0.5, 0.1, cfg) ==
        doctest::Approx(0.28279256710893017513).epsilon(1e-14));
  CHECK(gain_prescribed_time(0.3, 0.0, cfg) ==
        doctest::Approx(0.093105051900388136306).epsilon(1e-14));

  PrescribedTimeGain twelve(0.6, 1.0, 12, 0.594);
  CHECK(gain_prescribed_time(0.5, 0.1, twelve) ==
        doctest::Approx(0.28279255924589691656).epsilon(1e-14));

  PrescribedTimeGain one(0.6, 1.0, 1, 0.594);
  CHECK(gain_prescribed_time(0.5, 0.1, one) == doctest::Approx(0.432).epsilon(1e-14));
}

TEST_CASE("at the boundary every truncation level gives the same closed value") {
  // x=1 kills all shells beyond n=0: value is mu*T^3/(2*(T-t)^3).
  for (int terms : {1, 2, 8, 12}) {
    PrescribedTimeGain cfg(0.6, 1.0, terms, 0.594);
    CHECK(gain_prescribed_time(1.0, 0.3, cfg) == doctest::Approx(4.0).epsilon(1e-13));
    CHECK(gain_prescribed_time(1.0, 0.45, cfg) == doctest::Approx(32.0).epsilon(1e-13));
  }
}

TEST_CASE("gain evaluation is rejected outside [0, clamp)") {
  PrescribedTimeGain cfg(0.6, 1.0, 8, 0.594);
  CHECK_NOTHROW(gain_prescribed_time(0.5, 0.0, cfg));
  CHECK_NOTHROW(gain_prescribed_time(0.5, 0.59399999, cfg));
  CHECK_THROWS_AS(gain_prescribed_time(0.5, 0.594, cfg), TimeOutOfRange);
  CHECK_THROWS_AS(gain_prescribed_time(0.5, 0.6, cfg), TimeOutOfRange);
  CHECK_THROWS_AS(gain_prescribed_time(0.5, -1e-9, cfg), TimeOutOfRange);
  CHECK_THROWS_AS(gain_prescribed_time(0.5, std::nan(""), cfg), TimeOutOfRange);
}

TEST_CASE("grid helper pins the clamp one step before the horizon") {
  Grid g(51, 0.02, 100, 0.006);
  auto cfg = PrescribedTimeGain::with_grid(0.6, 1.0, 8, g);
  CHECK(cfg.clamp == doctest::Approx(0.594));
  CHECK(cfg.T_horizon == 0.6);
}

TEST_CASE("gain grows without bound toward the horizon") {
  PrescribedTimeGain cfg(0.6, 1.0, 8, 0.6 - 1e-7);
  const double near = gain_prescribed_time(1.0, 0.6 - 1e-6, cfg);
  CHECK(near > 1e14);  // mu*T^3/(2*(T-t)^3) with T-t = 1e-6
}
