#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nobs/errors.hpp"
#include "nobs/grid.hpp"

using namespace nobs;

TEST_CASE("grid validates its construction parameters") {
  CHECK_NOTHROW(Grid(3, 0.5, 1, 0.1));
  CHECK_THROWS_AS(Grid(2, 0.5, 1, 0.1), GridMismatch);
  CHECK_THROWS_AS(Grid(3, 0.0, 1, 0.1), GridMismatch);
  CHECK_THROWS_AS(Grid(3, 0.5, 0, 0.1), GridMismatch);
  CHECK_THROWS_AS(Grid(3, 0.5, 1, -0.1), GridMismatch);
}

TEST_CASE("grid coordinates and level count") {
  Grid g(11, 0.1, 4, 0.25);
  CHECK(g.x_max() == doctest::Approx(1.0));
  CHECK(g.x(3) == doctest::Approx(0.3));
  CHECK(g.t(4) == doctest::Approx(1.0));
  CHECK(g.n_levels() == 5);
}

TEST_CASE("trajectory layout is [component][level][space]") {
  Grid g(4, 0.1, 2, 0.1);
  Trajectory tr(g, 2);
  CHECK(tr.values.size() == 2 * 3 * 4);
  tr.at(1, 2, 3) = 7.0;
  CHECK(tr.values[1 * 3 * 4 + 2 * 4 + 3] == 7.0);
  CHECK(tr.level(1, 2)[3] == 7.0);
}

TEST_CASE("right-end slope closure is exact for quadratics") {
  // u(x) = x^2 has u'(1) = 2; the 3-point one-sided formula reproduces it.
  const int nx = 11;
  const double dx = 0.1;
  std::vector<double> u(nx);
  for (int i = 0; i < nx; ++i) u[i] = (i * dx) * (i * dx);
  CHECK(right_slope(u.data(), nx, dx) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("boundary-value measurement extracts the right-end sample") {
  Grid g(5, 0.25, 2, 0.1);
  Trajectory tr(g, 1);
  for (std::size_t k = 0; k < g.n_levels(); ++k)
    for (int i = 0; i < g.nx; ++i) tr.at(0, static_cast<int>(k), i) = 10.0 * k + i;
  auto ms = extract_measurements(tr, MeasurementKind::DirichletAt1);
  CHECK(ms.channels() == 1);
  CHECK(ms.at(0, 0) == 4.0);
  CHECK(ms.at(0, 2) == 24.0);
}

TEST_CASE("flux measurement matches the shared one-sided closure") {
  Grid g(6, 0.2, 1, 0.1);
  Trajectory tr(g, 1);
  for (int i = 0; i < g.nx; ++i) {
    const double x = g.x(i);
    tr.at(0, 0, i) = x * x;
    tr.at(0, 1, i) = 3.0 * x;
  }
  auto ms = extract_measurements(tr, MeasurementKind::NeumannAt1);
  CHECK(ms.at(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ms.at(0, 1) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("traffic measurement triple is (inlet flux, outlet velocity, outlet flux)") {
  Grid g(4, 1.0, 1, 0.1);
  Trajectory tr(g, 2);
  for (std::size_t k = 0; k < g.n_levels(); ++k)
    for (int i = 0; i < g.nx; ++i) {
      tr.at(0, static_cast<int>(k), i) = 0.1 + 0.01 * i + 0.001 * k;  // rho
      tr.at(1, static_cast<int>(k), i) = 10.0 + i + 0.1 * k;          // v
    }
  auto ms = extract_measurements(tr, MeasurementKind::TrafficTriple);
  CHECK(ms.channels() == 3);
  CHECK(ms.at(0, 0) == doctest::Approx(0.1 * 10.0));
  CHECK(ms.at(1, 0) == doctest::Approx(13.0));
  CHECK(ms.at(2, 0) == doctest::Approx(0.13 * 13.0));
  CHECK(ms.at(1, 1) == doctest::Approx(13.1));
}

TEST_CASE("measurement extraction rejects mismatched component counts") {
  Grid g(4, 1.0, 1, 0.1);
  CHECK_THROWS_AS(extract_measurements(Trajectory(g, 2), MeasurementKind::DirichletAt1),
                  KindMismatch);
  CHECK_THROWS_AS(extract_measurements(Trajectory(g, 1), MeasurementKind::TrafficTriple),
                  KindMismatch);
}

TEST_CASE("spatial L2 uses trapezoid weights") {
  // Constant 1 on [0,1] has norm 1 regardless of the grid.
  const int nx = 9;
  const double dx = 1.0 / (nx - 1);
  std::vector<double> u(nx, 1.0);
  CHECK(spatial_l2(u.data(), nx, dx) == doctest::Approx(1.0).epsilon(1e-14));
}
