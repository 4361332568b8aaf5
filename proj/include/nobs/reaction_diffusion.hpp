#pragma once

#include <vector>

#include "nobs/grid.hpp"

namespace nobs {

enum class LambdaMode { OnePeak, Constant };
enum class RdScheme { Explicit, ImplicitEuler };
// Right-boundary condition. NeumannZero is the default (u_x(1)=0, ghost
// closure). DirichletZero (u(1)=0) serves the flux-measured setup, where the
// sensed signal u_x(1,t) is only informative with a pinned right end.
enum class RightBc { NeumannZero, DirichletZero };

// Reaction-diffusion plant u_t = eps*u_xx + lambda(x)*u on x in [0,1],
// u(0,t) = 0, right end per right_bc.
struct ReactionDiffusionParams {
  double epsilon = 1.0;
  LambdaMode lambda_mode = LambdaMode::OnePeak;
  double alpha = 4.0;   // one-peak profile
  double beta = 2.0;
  double lambda = 0.0;  // constant profile
  RightBc right_bc = RightBc::NeumannZero;

  static ReactionDiffusionParams one_peak(double eps, double alpha, double beta);
  static ReactionDiffusionParams constant(double eps, double lambda);
};

// lambda(x): 2*eps*alpha^2 / cosh^2(alpha*x - beta) for the one-peak profile,
// or the constant value.
double lambda_profile(double x, const ReactionDiffusionParams& params);

Trajectory simulate_reaction_diffusion(const std::vector<double>& ic,
                                       const ReactionDiffusionParams& params, const Grid& grid,
                                       RdScheme scheme);

// Shared single-step kernels so observers integrate with the plant's scheme.
namespace rd_detail {

// One explicit step: out = u + dt*(eps u_xx + lambda u) + dt*source.
// Dirichlet at i=0, ghost-point Neumann at i=nx-1. source may be null.
void explicit_step(const double* u, double* out, int nx, double dx, double dt,
                   const ReactionDiffusionParams& params, const double* source);

// Tridiagonal factorization of the implicit-Euler matrix
// B = I - dt*(eps D2 + diag(lambda)) over the unknowns i = 1..nx-1.
struct ImplicitOperator {
  int nx = 0;
  double dx = 0.0, dt = 0.0;
  bool dirichlet_right = false;
  std::vector<double> diag, lower, upper;  // rows i=1..nx-1
  std::vector<double> cp;                  // Thomas scratch

  ImplicitOperator(int nx, double dx, double dt, const ReactionDiffusionParams& params);
  // Solves B out = u + dt*source (source may be null); out[0] = 0.
  void solve(const double* u, double* out, const double* source);
};

}  // namespace rd_detail
}  // namespace nobs
