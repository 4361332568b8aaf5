#pragma once

#include <cstddef>
#include <vector>

#include "nobs/errors.hpp"

namespace nobs {

// Uniform space-time grid shared by plants, observers, and surrogates.
// Spatial samples include both endpoints: x_i = i*dx, i in [0, nx-1].
// Time levels: t_k = k*dt, k in [0, nt].
struct Grid {
  int nx = 0;
  double dx = 0.0;
  int nt = 0;
  double dt = 0.0;

  Grid() = default;
  Grid(int nx_, double dx_, int nt_, double dt_);

  double x_max() const { return (nx - 1) * dx; }
  double x(int i) const { return i * dx; }
  double t(int k) const { return k * dt; }
  std::size_t n_levels() const { return static_cast<std::size_t>(nt) + 1; }

  bool operator==(const Grid& o) const {
    return nx == o.nx && dx == o.dx && nt == o.nt && dt == o.dt;
  }
};

// A scalar or two-component field sampled on a Grid.
// values laid out as [component][time level][space index], flattened row-major.
struct Trajectory {
  Grid grid;
  int components = 1;
  std::vector<double> values;

  Trajectory() = default;
  Trajectory(const Grid& g, int components);

  double& at(int c, int k, int i) {
    return values[(static_cast<std::size_t>(c) * grid.n_levels() + k) * grid.nx + i];
  }
  double at(int c, int k, int i) const {
    return values[(static_cast<std::size_t>(c) * grid.n_levels() + k) * grid.nx + i];
  }
  // Pointer to the spatial slice of component c at time level k.
  double* level(int c, int k) {
    return values.data() + (static_cast<std::size_t>(c) * grid.n_levels() + k) * grid.nx;
  }
  const double* level(int c, int k) const {
    return values.data() + (static_cast<std::size_t>(c) * grid.n_levels() + k) * grid.nx;
  }
};

enum class MeasurementKind { DirichletAt1, NeumannAt1, TrafficTriple };

// Per-time-step boundary signals. One row for the scalar kinds; three rows
// (y_q inflow flux, y_v outlet velocity, y_out outlet flux) for TrafficTriple.
struct MeasurementSeries {
  MeasurementKind kind = MeasurementKind::DirichletAt1;
  Grid grid;
  std::vector<double> values;  // [channel][time level]

  int channels() const { return kind == MeasurementKind::TrafficTriple ? 3 : 1; }
  double& at(int c, int k) { return values[static_cast<std::size_t>(c) * grid.n_levels() + k]; }
  double at(int c, int k) const {
    return values[static_cast<std::size_t>(c) * grid.n_levels() + k];
  }
};

// Second-order one-sided slope at the right endpoint.
// Shares the closure used by the Neumann boundary and the flux measurement.
inline double right_slope(const double* u, int nx, double dx) {
  return (3.0 * u[nx - 1] - 4.0 * u[nx - 2] + u[nx - 3]) / (2.0 * dx);
}

MeasurementSeries extract_measurements(const Trajectory& traj, MeasurementKind kind);

// Discrete L2 norm over a spatial slice: trapezoid weights so that the
// right-endpoint half-cell does not over-count boundary values.
double spatial_l2(const double* u, int nx, double dx);

}  // namespace nobs
