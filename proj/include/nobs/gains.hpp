#pragma once

#include <vector>

#include "nobs/grid.hpp"

namespace nobs {

// Closed-form observer gain for the reaction-diffusion plant with the
// one-peak reaction profile:
//   p1(x) = eps*alpha^2*tanh(beta)*(tanh(beta) - tanh(beta - alpha*x))
//           * exp((1-x)*alpha*tanh(beta))
double gain_exponential(double x, double alpha, double beta, double epsilon);

struct ExponentialGain {
  double alpha = 4.0, beta = 2.0, epsilon = 1.0;
  std::vector<double> sampled;  // p1 at every grid point

  static ExponentialGain sample(double alpha, double beta, double epsilon, const Grid& grid);
};

// Time-varying gain with prescribed convergence time T_horizon. Evaluation is
// a truncated series (n_terms shells); it blows up as t -> T_horizon, so all
// evaluations are clamped to t < clamp (default T_horizon - dt).
struct PrescribedTimeGain {
  double T_horizon = 0.6;
  double mu = 1.0;
  int n_terms = 8;
  double clamp = 0.0;  // latest evaluable time

  PrescribedTimeGain(double T, double mu, int n_terms, double clamp)
      : T_horizon(T), mu(mu), n_terms(n_terms), clamp(clamp) {}
  static PrescribedTimeGain with_grid(double T, double mu, int n_terms, const Grid& grid) {
    return PrescribedTimeGain(T, mu, n_terms, T - grid.dt);
  }
};

// Partial sum over n in [0, n_terms-1]; inner sums evaluated with exact
// integer binomial coefficients. At x=1 every n>=1 shell vanishes, leaving
// mu*T^3/(2*(T-t)^3) for any truncation level.
double gain_prescribed_time(double x, double t, const PrescribedTimeGain& cfg);

}  // namespace nobs
