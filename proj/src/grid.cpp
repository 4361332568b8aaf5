#include "nobs/grid.hpp"

#include <cmath>

namespace nobs {

Grid::Grid(int nx_, double dx_, int nt_, double dt_) : nx(nx_), dx(dx_), nt(nt_), dt(dt_) {
  if (nx < 3 || dx <= 0.0 || nt < 1 || dt <= 0.0)
    throw GridMismatch("grid needs nx >= 3, nt >= 1 and positive steps");
}

Trajectory::Trajectory(const Grid& g, int components_) : grid(g), components(components_) {
  values.assign(static_cast<std::size_t>(components) * grid.n_levels() * grid.nx, 0.0);
}

MeasurementSeries extract_measurements(const Trajectory& traj, MeasurementKind kind) {
  MeasurementSeries ms;
  ms.kind = kind;
  ms.grid = traj.grid;
  const int nx = traj.grid.nx;
  const std::size_t nl = traj.grid.n_levels();
  switch (kind) {
    case MeasurementKind::DirichletAt1: {
      if (traj.components != 1) throw KindMismatch("scalar trajectory expected");
      ms.values.resize(nl);
      for (std::size_t k = 0; k < nl; ++k)
        ms.values[k] = traj.at(0, static_cast<int>(k), nx - 1);
      break;
    }
    case MeasurementKind::NeumannAt1: {
      if (traj.components != 1) throw KindMismatch("scalar trajectory expected");
      ms.values.resize(nl);
      for (std::size_t k = 0; k < nl; ++k)
        ms.values[k] = right_slope(traj.level(0, static_cast<int>(k)), nx, traj.grid.dx);
      break;
    }
    case MeasurementKind::TrafficTriple: {
      if (traj.components != 2) throw KindMismatch("(rho, v) trajectory expected");
      ms.values.resize(3 * nl);
      for (std::size_t k = 0; k < nl; ++k) {
        const int ki = static_cast<int>(k);
        const double rho0 = traj.at(0, ki, 0), v0 = traj.at(1, ki, 0);
        const double rhoL = traj.at(0, ki, nx - 1), vL = traj.at(1, ki, nx - 1);
        ms.at(0, ki) = rho0 * v0;  // y_q: inlet flux
        ms.at(1, ki) = vL;         // y_v: outlet velocity
        ms.at(2, ki) = rhoL * vL;  // y_out: outlet flux
      }
      break;
    }
  }
  return ms;
}

double spatial_l2(const double* u, int nx, double dx) {
  double s = 0.5 * (u[0] * u[0] + u[nx - 1] * u[nx - 1]);
  for (int i = 1; i < nx - 1; ++i) s += u[i] * u[i];
  return std::sqrt(s * dx);
}

}  // namespace nobs
