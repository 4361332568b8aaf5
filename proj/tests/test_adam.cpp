#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nobs/adam.hpp"
#include "nobs/rng.hpp"

using namespace nobs;

namespace {

// Scalar reference implementation, kept independent of the library code.
struct RefAdam {
  double m = 0.0, v = 0.0;
  long t = 0;
  double step(double p, double g, const AdamConfig& c) {
    ++t;
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = c.beta2 * v + (1.0 - c.beta2) * g * g;
    const double mh = m / (1.0 - std::pow(c.beta1, t));
    const double vh = v / (1.0 - std::pow(c.beta2, t));
    return p - c.lr * mh / (std::sqrt(vh) + c.eps);
  }
};

}  // namespace

TEST_CASE("first update moves by roughly lr in the gradient direction") {
  AdamConfig cfg;
  Tensor p = Tensor::scalar(1.0);
  Tensor g = Tensor::scalar(3.0);
  AdamState st = AdamState::for_param(p);
  adam_step(p, g, st, cfg);
  // After bias correction the first step is lr * g / (|g| + eps) ~ lr.
  CHECK(p.data[0] == doctest::Approx(1.0 - cfg.lr).epsilon(1e-6));
  CHECK(st.step == 1);

  Tensor pn = Tensor::scalar(1.0);
  Tensor gn = Tensor::scalar(-0.02);
  AdamState stn = AdamState::for_param(pn);
  adam_step(pn, gn, stn, cfg);
  CHECK(pn.data[0] == doctest::Approx(1.0 + cfg.lr).epsilon(1e-5));
}

TEST_CASE("multi-step trajectory matches the scalar reference") {
  AdamConfig cfg;
  cfg.lr = 0.05;
  Tensor p = Tensor::scalar(0.3);
  AdamState st = AdamState::for_param(p);
  RefAdam ref;
  double rp = 0.3;
  for (int k = 0; k < 50; ++k) {
    const double g = 2.0 * rp - 0.8;  // gradient of (p - 0.4)^2
    Tensor gt = Tensor::scalar(2.0 * p.data[0] - 0.8);
    adam_step(p, gt, st, cfg);
    rp = ref.step(rp, g, cfg);
    CHECK(p.data[0] == doctest::Approx(rp).epsilon(1e-14));
  }
  // The quadratic is actually being minimized.
  CHECK(std::abs(p.data[0] - 0.4) < 0.05);
}

TEST_CASE("updates apply across full tensor storage, complex included") {
  AdamConfig cfg;
  Tensor p = Tensor::zeros({3}, true);
  Tensor g = Tensor::zeros({3}, true);
  for (long i = 0; i < p.storage(); ++i) {
    p.data[i] = rng::normal(1, 0, i);
    g.data[i] = rng::normal(1, 1, i);
  }
  AdamState st = AdamState::for_param(p);
  REQUIRE(static_cast<long>(st.m.size()) == 6);
  Tensor before = p;
  adam_step(p, g, st, cfg);
  for (long i = 0; i < p.storage(); ++i) {
    const double moved = before.data[i] - p.data[i];
    // Same |step| ~ lr for every slot, signed like its own gradient.
    CHECK(std::abs(moved) == doctest::Approx(cfg.lr).epsilon(1e-5));
    CHECK(moved * g.data[i] > 0.0);
  }
}
