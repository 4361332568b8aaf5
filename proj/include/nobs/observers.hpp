#pragma once

#include <vector>

#include "nobs/arz.hpp"
#include "nobs/gains.hpp"
#include "nobs/grid.hpp"
#include "nobs/reaction_diffusion.hpp"

namespace nobs {

// Luenberger observer for the one-peak reaction-diffusion plant:
// copy of the plant plus p1(x)*[y(t) - u_hat(1,t)] driven by the Dirichlet
// boundary measurement y(t) = u(1,t). Integrates with the same scheme and
// boundary closure as simulate_reaction_diffusion.
Trajectory run_observer_reaction_diffusion(const MeasurementSeries& ms,
                                           const ExponentialGain& gain,
                                           const ReactionDiffusionParams& params, const Grid& grid,
                                           const std::vector<double>& ic_hat,
                                           RdScheme scheme = RdScheme::Explicit);

// Prescribed-time observer for the constant-lambda plant with pinned ends,
// driven by the flux measurement y(t) = u_x(1,t). Implicit Euler; the
// time-varying gain is evaluated at the step's start time and the output
// error at the new level, with the injection folded into the linear solve
// (rank-one update), which keeps the step well-posed even for the large
// gain values near the horizon.
Trajectory run_observer_prescribed_time(const MeasurementSeries& ms,
                                        const PrescribedTimeGain& cfg,
                                        const ReactionDiffusionParams& params, const Grid& grid,
                                        const std::vector<double>& ic_hat);

// How the traffic observer realizes the output-error injection terms.
// OutletFluxError: E_w = E_v = y_out - rho_hat(L)*v_hat(L), scaled by `scale`,
// entering through the printed prefactors. None: boundary-driven observer
// only (injection terms zero); convergence is then carried entirely by the
// measured boundary data.
enum class InjectionKind { OutletFluxError, None };

struct InjectionConfig {
  InjectionKind kind = InjectionKind::OutletFluxError;
  double scale = 1.0;
};

struct TrafficObserverGains {
  ArzParams params;
  double lambda1 = 0.0, lambda2 = 0.0;  // characteristic speeds at the reference state
  InjectionConfig injection;

  static TrafficObserverGains at_reference(const ArzParams& params,
                                           InjectionConfig injection = {});
};

// ARZ traffic observer: Lax-Wendroff copy of the plant with boundary
// conditions rho_hat(0,t) = y_q(t)/v_hat(0,t), v_hat(L,t) = y_v(t), and
// interior injection per gains.injection. Throws DivisionGuard when
// v_hat(0,t) falls below 1e-6 m/s.
Trajectory run_observer_arz(const MeasurementSeries& ms, const TrafficObserverGains& gains,
                            const Grid& grid, const std::vector<double>& ic_hat_rho,
                            const std::vector<double>& ic_hat_v);

}  // namespace nobs
