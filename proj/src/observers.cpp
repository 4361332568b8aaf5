#include "nobs/observers.hpp"

#include <cmath>
#include <cstring>
#include <vector>

#include "nobs/errors.hpp"

namespace nobs {

namespace {

void require_grid(const MeasurementSeries& ms, const Grid& grid) {
  if (!(ms.grid == grid)) throw GridMismatch("measurement series grid differs");
}

}  // namespace

Trajectory run_observer_reaction_diffusion(const MeasurementSeries& ms,
                                           const ExponentialGain& gain,
                                           const ReactionDiffusionParams& params,
                                           const Grid& grid, const std::vector<double>& ic_hat,
                                           RdScheme scheme) {
  if (ms.kind != MeasurementKind::DirichletAt1)
    throw KindMismatch("boundary-value measurement expected");
  require_grid(ms, grid);
  if (static_cast<int>(ic_hat.size()) != grid.nx)
    throw GridMismatch("initial estimate length does not match grid");
  if (std::abs(ic_hat[0]) > 1e-12)
    throw IncompatibleIc("initial estimate must vanish at the pinned inlet");
  if (static_cast<int>(gain.sampled.size()) != grid.nx)
    throw GridMismatch("gain must be sampled on the grid");
  if (scheme == RdScheme::Explicit) {
    const double cfl = params.epsilon * grid.dt / (grid.dx * grid.dx);
    if (cfl > 0.5) throw CflViolation("explicit step needs eps*dt/dx^2 <= 0.5");
  }

  Trajectory traj(grid, 1);
  std::memcpy(traj.level(0, 0), ic_hat.data(), sizeof(double) * grid.nx);
  const int nx = grid.nx;

  if (scheme == RdScheme::Explicit) {
    std::vector<double> source(nx);
    for (int k = 0; k < grid.nt; ++k) {
      const double* u = traj.level(0, k);
      const double err = ms.at(0, k) - u[nx - 1];
      for (int i = 0; i < nx; ++i) source[i] = gain.sampled[i] * err;
      rd_detail::explicit_step(u, traj.level(0, k + 1), nx, grid.dx, grid.dt, params,
                               source.data());
    }
  } else {
    // Injection folded into the solve so the output error is evaluated at
    // the new level: with a = B^-1 u, b = B^-1 (dt p), e the right-end value,
    //   u_new = a + b * (y_new - a_e) / (1 + b_e).
    rd_detail::ImplicitOperator op(nx, grid.dx, grid.dt, params);
    std::vector<double> a(nx), b(nx);
    // b = B^-1 (dt p); the operator is time-invariant so one solve suffices.
    op.solve(gain.sampled.data(), b.data(), nullptr);
    for (double& d : b) d *= grid.dt;
    for (int k = 0; k < grid.nt; ++k) {
      op.solve(traj.level(0, k), a.data(), nullptr);
      const double denom = 1.0 + b[nx - 1];
      const double corr = (ms.at(0, k + 1) - a[nx - 1]) / denom;
      double* out = traj.level(0, k + 1);
      for (int i = 0; i < nx; ++i) out[i] = a[i] + b[i] * corr;
    }
  }
  return traj;
}

Trajectory run_observer_prescribed_time(const MeasurementSeries& ms,
                                        const PrescribedTimeGain& cfg,
                                        const ReactionDiffusionParams& params, const Grid& grid,
                                        const std::vector<double>& ic_hat) {
  if (ms.kind != MeasurementKind::NeumannAt1)
    throw KindMismatch("boundary-flux measurement expected");
  require_grid(ms, grid);
  if (static_cast<int>(ic_hat.size()) != grid.nx)
    throw GridMismatch("initial estimate length does not match grid");
  if (grid.nt * grid.dt > cfg.clamp + 1e-12)
    throw TimeOutOfRange("observer horizon extends beyond the gain clamp");

  // The flux-driven design needs both ends pinned; the right closure is
  // forced regardless of what the caller left in params.
  ReactionDiffusionParams p = params;
  p.right_bc = RightBc::DirichletZero;

  Trajectory traj(grid, 1);
  std::memcpy(traj.level(0, 0), ic_hat.data(), sizeof(double) * grid.nx);
  const int nx = grid.nx;
  rd_detail::ImplicitOperator op(nx, grid.dx, grid.dt, p);

  std::vector<double> pk(nx), a(nx), b(nx);
  for (int k = 0; k < grid.nt; ++k) {
    // Gain at the step's start time; sign chosen so the flux-error feedback
    // damps the estimate under this discretization (the raw series value has
    // the opposite orientation).
    for (int i = 0; i < nx; ++i)
      pk[i] = -gain_prescribed_time(grid.x(i), grid.t(k), cfg) * grid.dt;
    op.solve(traj.level(0, k), a.data(), nullptr);
    op.solve(pk.data(), b.data(), nullptr);
    // Explicit injection of the old-level error diverges once the gain grows
    // near the horizon; folding the rank-one correction into the solve keeps
    // the update well-posed:  u_new = a + b * (y_new - s(a)) / (1 + s(b)),
    // s being the one-sided right-end slope shared with the measurement.
    const double sa = right_slope(a.data(), nx, grid.dx);
    const double sb = right_slope(b.data(), nx, grid.dx);
    const double corr = (ms.at(0, k + 1) - sa) / (1.0 + sb);
    double* out = traj.level(0, k + 1);
    for (int i = 0; i < nx; ++i) out[i] = a[i] + b[i] * corr;
  }
  return traj;
}

TrafficObserverGains TrafficObserverGains::at_reference(const ArzParams& params,
                                                        InjectionConfig injection) {
  TrafficObserverGains g;
  g.params = params;
  g.lambda1 = params.lambda1();
  g.lambda2 = params.lambda2();
  g.injection = injection;
  return g;
}

Trajectory run_observer_arz(const MeasurementSeries& ms, const TrafficObserverGains& gains,
                            const Grid& grid, const std::vector<double>& ic_hat_rho,
                            const std::vector<double>& ic_hat_v) {
  if (ms.kind != MeasurementKind::TrafficTriple)
    throw KindMismatch("traffic measurement triple expected");
  require_grid(ms, grid);
  if (static_cast<int>(ic_hat_rho.size()) != grid.nx ||
      static_cast<int>(ic_hat_v.size()) != grid.nx)
    throw GridMismatch("initial estimate length does not match grid");
  arz_detail::check_physical(ic_hat_rho.data(), ic_hat_v.data(), grid.nx, 0);

  const ArzParams& p = gains.params;
  Trajectory traj(grid, 2);
  std::memcpy(traj.level(0, 0), ic_hat_rho.data(), sizeof(double) * grid.nx);
  std::memcpy(traj.level(1, 0), ic_hat_v.data(), sizeof(double) * grid.nx);
  const int nx = grid.nx;

  const bool inject = gains.injection.kind == InjectionKind::OutletFluxError;
  const double wexp = std::exp(-p.L_r / (p.tau * gains.lambda1));
  std::vector<double> inj_r(nx), inj_v(nx);

  for (int k = 0; k < grid.nt; ++k) {
    const double* r = traj.level(0, k);
    const double* v = traj.level(1, k);
    const double* ir = nullptr;
    const double* iv = nullptr;
    if (inject) {
      // Output error: measured outlet flux minus estimated outlet flux,
      // driving both components through constant prefactors.
      const double eq = ms.at(2, k) - r[nx - 1] * v[nx - 1];
      const double s = gains.injection.scale;
      const double cr = s * (wexp - 1.0) / p.v_star;
      const double cv = s * (gains.lambda1 - gains.lambda2) / p.q_star;
      for (int i = 0; i < nx; ++i) {
        inj_r[i] = cr * eq;
        inj_v[i] = cv * eq;
      }
      ir = inj_r.data();
      iv = inj_v.data();
    }
    double* rn = traj.level(0, k + 1);
    double* vn = traj.level(1, k + 1);
    arz_detail::lw_step(r, v, rn, vn, nx, grid.dx, grid.dt, p, ir, iv);
    // Estimated inlet density from the measured inlet flux; outlet velocity
    // is the measured one.
    vn[0] = vn[1];
    if (!(vn[0] > 1e-6)) throw DivisionGuard("estimated inlet velocity below guard");
    rn[0] = ms.at(0, k + 1) / vn[0];
    rn[nx - 1] = rn[nx - 2];
    vn[nx - 1] = ms.at(1, k + 1);
    arz_detail::check_physical(rn, vn, nx, k + 1);
  }
  return traj;
}

}  // namespace nobs
