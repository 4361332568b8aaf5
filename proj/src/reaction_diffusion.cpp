#include "nobs/reaction_diffusion.hpp"

#include <cmath>
#include <cstring>

#include "nobs/errors.hpp"

namespace nobs {

ReactionDiffusionParams ReactionDiffusionParams::one_peak(double eps, double alpha,
                                                          double beta) {
  ReactionDiffusionParams p;
  p.epsilon = eps;
  p.lambda_mode = LambdaMode::OnePeak;
  p.alpha = alpha;
  p.beta = beta;
  return p;
}

ReactionDiffusionParams ReactionDiffusionParams::constant(double eps, double lambda) {
  ReactionDiffusionParams p;
  p.epsilon = eps;
  p.lambda_mode = LambdaMode::Constant;
  p.lambda = lambda;
  return p;
}

double lambda_profile(double x, const ReactionDiffusionParams& params) {
  if (params.lambda_mode == LambdaMode::Constant) return params.lambda;
  const double c = std::cosh(params.alpha * x - params.beta);
  return 2.0 * params.epsilon * params.alpha * params.alpha / (c * c);
}

namespace rd_detail {

void explicit_step(const double* u, double* out, int nx, double dx, double dt,
                   const ReactionDiffusionParams& params, const double* source) {
  const double r = params.epsilon * dt / (dx * dx);
  out[0] = 0.0;
  for (int i = 1; i < nx - 1; ++i) {
    const double lam = lambda_profile(i * dx, params);
    out[i] = u[i] + r * (u[i + 1] - 2.0 * u[i] + u[i - 1]) + dt * lam * u[i];
    if (source) out[i] += dt * source[i];
  }
  if (params.right_bc == RightBc::DirichletZero) {
    out[nx - 1] = 0.0;
  } else {
    // Ghost point u[nx] = u[nx-2] keeps the zero-flux closure second order.
    const double lam = lambda_profile((nx - 1) * dx, params);
    out[nx - 1] =
        u[nx - 1] + r * (2.0 * u[nx - 2] - 2.0 * u[nx - 1]) + dt * lam * u[nx - 1];
    if (source) out[nx - 1] += dt * source[nx - 1];
  }
}

ImplicitOperator::ImplicitOperator(int nx_, double dx_, double dt_,
                                   const ReactionDiffusionParams& params)
    : nx(nx_), dx(dx_), dt(dt_) {
  const int n = nx - 1;  // unknowns i = 1..nx-1
  diag.resize(n);
  lower.assign(n, 0.0);
  upper.assign(n, 0.0);
  cp.resize(n);
  const double r = params.epsilon * dt / (dx * dx);
  for (int row = 0; row < n; ++row) {
    const int i = row + 1;
    const double lam = lambda_profile(i * dx, params);
    diag[row] = 1.0 + 2.0 * r - dt * lam;
    if (row > 0) lower[row] = -r;
    if (row < n - 1) upper[row] = -r;
  }
  // Right-end closure replaces the last row.
  dirichlet_right = params.right_bc == RightBc::DirichletZero;
  if (dirichlet_right) {
    diag[n - 1] = 1.0;
    lower[n - 1] = 0.0;
  } else {
    lower[n - 1] = -2.0 * r;  // ghost point folds u[nx] into u[nx-2]
  }
}

void ImplicitOperator::solve(const double* u, double* out, const double* source) {
  const int n = nx - 1;
  // Thomas algorithm; cp holds the modified upper diagonal, out the rhs.
  out[0] = 0.0;
  double* d = out + 1;
  for (int row = 0; row < n; ++row) {
    const int i = row + 1;
    d[row] = u[i];
    if (source) d[row] += dt * source[i];
  }
  if (dirichlet_right) d[n - 1] = 0.0;
  cp[0] = upper[0] / diag[0];
  d[0] = d[0] / diag[0];
  for (int row = 1; row < n; ++row) {
    const double m = 1.0 / (diag[row] - lower[row] * cp[row - 1]);
    cp[row] = upper[row] * m;
    d[row] = (d[row] - lower[row] * d[row - 1]) * m;
  }
  for (int row = n - 2; row >= 0; --row) d[row] -= cp[row] * d[row + 1];
}

}  // namespace rd_detail

Trajectory simulate_reaction_diffusion(const std::vector<double>& ic,
                                       const ReactionDiffusionParams& params, const Grid& grid,
                                       RdScheme scheme) {
  if (static_cast<int>(ic.size()) != grid.nx)
    throw GridMismatch("initial condition length does not match grid");
  if (std::abs(ic[0]) > 1e-12)
    throw IncompatibleIc("initial condition must vanish at the pinned inlet");
  if (scheme == RdScheme::Explicit) {
    const double cfl = params.epsilon * grid.dt / (grid.dx * grid.dx);
    if (cfl > 0.5) throw CflViolation("explicit step needs eps*dt/dx^2 <= 0.5");
  }

  Trajectory traj(grid, 1);
  std::memcpy(traj.level(0, 0), ic.data(), sizeof(double) * grid.nx);

  if (scheme == RdScheme::Explicit) {
    for (int k = 0; k < grid.nt; ++k)
      rd_detail::explicit_step(traj.level(0, k), traj.level(0, k + 1), grid.nx, grid.dx,
                               grid.dt, params, nullptr);
  } else {
    rd_detail::ImplicitOperator op(grid.nx, grid.dx, grid.dt, params);
    for (int k = 0; k < grid.nt; ++k)
      op.solve(traj.level(0, k), traj.level(0, k + 1), nullptr);
  }
  return traj;
}

}  // namespace nobs
