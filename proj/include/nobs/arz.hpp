#pragma once

#include <vector>

#include "nobs/grid.hpp"

namespace nobs {

// Aw-Rascle-Zhang traffic model in (rho, v) with Greenshields equilibrium
// speed V(rho) = v_free*(1 - rho/rho_max) and relaxation time tau:
//   rho_t + (rho v)_x = 0
//   v_t + (v + rho V'(rho)) v_x = (V(rho) - v)/tau
struct ArzParams {
  double L_r = 500.0;      // freeway length [m]
  double tau = 60.0;       // relaxation time [s]
  double rho_max = 0.16;   // jam density [veh/m]
  double v_free = 40.0;    // free-flow speed [m/s]
  double rho_star = 0.12;  // reference density [veh/m]
  double v_star = 10.0;    // reference velocity [m/s]
  double q_star = 1.2;     // reference flux = rho_star*v_star [veh/s]

  static ArzParams reference(double rho_star, double v_star);

  double V(double rho) const { return v_free * (1.0 - rho / rho_max); }
  double Vprime() const { return -v_free / rho_max; }
  // Characteristic speeds at the reference state.
  double lambda1() const { return v_star; }
  double lambda2() const { return v_star + rho_star * Vprime(); }
};

// Lax-Wendroff (Richtmyer two-step) integration of the ARZ system.
// inflow: prescribed inlet flux q(0,t) per time level (length nt+1).
// outflow_bc: prescribed outlet velocity v(L_r,t) per time level.
// Boundary treatment: first-order extrapolation of the outgoing
// characteristic, prescribed data overwriting the incoming one.
Trajectory simulate_arz(const std::vector<double>& ic_rho, const std::vector<double>& ic_v,
                        const ArzParams& params, const Grid& grid,
                        const std::vector<double>& inflow, const std::vector<double>& outflow_bc);

namespace arz_detail {

// One Richtmyer step on conservative variables (rho, z = rho*(v - V(rho))),
// relaxation source staged at both half and full steps. Injection sources
// (per-cell rates on the primitive (rho, v) pair) may be null.
// Updates interior cells only; callers set the boundary rows afterwards.
void lw_step(const double* rho, const double* v, double* rho_out, double* v_out, int nx,
             double dx, double dt, const ArzParams& params, const double* inj_rho,
             const double* inj_v);

// Throws NonPhysicalState when rho or v drops to/below zero or goes non-finite.
void check_physical(const double* rho, const double* v, int nx, long step);

}  // namespace arz_detail
}  // namespace nobs
