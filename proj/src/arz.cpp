#include "nobs/arz.hpp"

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "nobs/errors.hpp"

namespace nobs {

ArzParams ArzParams::reference(double rho_star_, double v_star_) {
  ArzParams p;
  p.rho_star = rho_star_;
  p.v_star = v_star_;
  p.q_star = rho_star_ * v_star_;
  return p;
}

namespace arz_detail {

void check_physical(const double* rho, const double* v, int nx, long step) {
  for (int i = 0; i < nx; ++i) {
    if (!(rho[i] > 0.0) || !(v[i] > 0.0) || !std::isfinite(rho[i]) || !std::isfinite(v[i]))
      throw NonPhysicalState("non-physical state (rho=" + std::to_string(rho[i]) +
                                 ", v=" + std::to_string(v[i]) + ") at cell " +
                                 std::to_string(i) + ", step " + std::to_string(step),
                             step);
  }
}

// Conservative pair: (rho, y) with y = rho*(v - V(rho)). The relaxation
// source is then simply -y/tau; primitive injection rates map to
// S_y = (v - V - rho V') S_rho + rho S_v.
void lw_step(const double* rho, const double* v, double* rho_out, double* v_out, int nx,
             double dx, double dt, const ArzParams& params, const double* inj_rho,
             const double* inj_v) {
  const double vp = params.Vprime();
  std::vector<double> y(nx), f_r(nx), f_y(nx);
  for (int i = 0; i < nx; ++i) {
    y[i] = rho[i] * (v[i] - params.V(rho[i]));
    f_r[i] = rho[i] * v[i];
    f_y[i] = y[i] * v[i];
  }

  auto src = [&](double r, double yv, double ir, double iv, double* sr, double* sy) {
    const double vv = yv / r + params.V(r);
    *sr = ir;
    *sy = -yv / params.tau + (vv - params.V(r) - r * vp) * ir + r * iv;
  };

  // Half states at the nx-1 interfaces.
  std::vector<double> rh(nx - 1), yh(nx - 1);
  const double c = dt / (2.0 * dx);
  for (int i = 0; i < nx - 1; ++i) {
    const double rm = 0.5 * (rho[i] + rho[i + 1]);
    const double ym = 0.5 * (y[i] + y[i + 1]);
    const double ir = inj_rho ? 0.5 * (inj_rho[i] + inj_rho[i + 1]) : 0.0;
    const double iv = inj_v ? 0.5 * (inj_v[i] + inj_v[i + 1]) : 0.0;
    double sr, sy;
    src(rm, ym, ir, iv, &sr, &sy);
    rh[i] = rm - c * (f_r[i + 1] - f_r[i]) + 0.5 * dt * sr;
    yh[i] = ym - c * (f_y[i + 1] - f_y[i]) + 0.5 * dt * sy;
  }

  // Full step on interior cells from interface fluxes.
  std::vector<double> fh_r(nx - 1), fh_y(nx - 1);
  for (int i = 0; i < nx - 1; ++i) {
    const double vv = yh[i] / rh[i] + params.V(rh[i]);
    fh_r[i] = rh[i] * vv;
    fh_y[i] = yh[i] * vv;
  }
  const double c2 = dt / dx;
  for (int i = 1; i < nx - 1; ++i) {
    const double rm = 0.5 * (rh[i - 1] + rh[i]);
    const double ym = 0.5 * (yh[i - 1] + yh[i]);
    const double ir = inj_rho ? inj_rho[i] : 0.0;
    const double iv = inj_v ? inj_v[i] : 0.0;
    double sr, sy;
    src(rm, ym, ir, iv, &sr, &sy);
    const double rn = rho[i] - c2 * (fh_r[i] - fh_r[i - 1]) + dt * sr;
    const double yn = y[i] - c2 * (fh_y[i] - fh_y[i - 1]) + dt * sy;
    rho_out[i] = rn;
    v_out[i] = yn / rn + params.V(rn);
  }
}

}  // namespace arz_detail

namespace {

double max_char_speed(const double* rho, const double* v, int nx, const ArzParams& p) {
  double s = 0.0;
  for (int i = 0; i < nx; ++i) {
    s = std::max(s, std::abs(v[i]));
    s = std::max(s, std::abs(v[i] + rho[i] * p.Vprime()));
  }
  return s;
}

}  // namespace

Trajectory simulate_arz(const std::vector<double>& ic_rho, const std::vector<double>& ic_v,
                        const ArzParams& params, const Grid& grid,
                        const std::vector<double>& inflow,
                        const std::vector<double>& outflow_bc) {
  if (static_cast<int>(ic_rho.size()) != grid.nx || static_cast<int>(ic_v.size()) != grid.nx)
    throw GridMismatch("initial condition length does not match grid");
  if (inflow.size() != grid.n_levels() || outflow_bc.size() != grid.n_levels())
    throw GridMismatch("boundary series length must be nt+1");
  arz_detail::check_physical(ic_rho.data(), ic_v.data(), grid.nx, 0);
  const double smax = max_char_speed(ic_rho.data(), ic_v.data(), grid.nx, params);
  if (smax * grid.dt / grid.dx > 1.0 + 1e-12)
    throw CflViolation("Lax-Wendroff step needs max|char speed|*dt/dx <= 1");

  Trajectory traj(grid, 2);
  std::memcpy(traj.level(0, 0), ic_rho.data(), sizeof(double) * grid.nx);
  std::memcpy(traj.level(1, 0), ic_v.data(), sizeof(double) * grid.nx);

  for (int k = 0; k < grid.nt; ++k) {
    const double* r = traj.level(0, k);
    const double* v = traj.level(1, k);
    double* rn = traj.level(0, k + 1);
    double* vn = traj.level(1, k + 1);
    arz_detail::lw_step(r, v, rn, vn, grid.nx, grid.dx, grid.dt, params, nullptr, nullptr);
    // Inlet: outgoing (slow) characteristic extrapolated through v, the
    // prescribed flux pins rho. Outlet: outgoing carries rho out, the
    // prescribed velocity is the incoming datum.
    vn[0] = vn[1];
    if (!(vn[0] > 1e-6))
      throw NonPhysicalState("inlet velocity collapsed", k + 1);
    rn[0] = inflow[k + 1] / vn[0];
    rn[grid.nx - 1] = rn[grid.nx - 2];
    vn[grid.nx - 1] = outflow_bc[k + 1];
    arz_detail::check_physical(rn, vn, grid.nx, k + 1);
  }
  return traj;
}

}  // namespace nobs
