#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "nobs/errors.hpp"
#include "nobs/reaction_diffusion.hpp"

using namespace nobs;

namespace {

std::vector<double> half_mode(const Grid& g) {
  std::vector<double> ic(g.nx);
  for (int i = 0; i < g.nx; ++i) ic[i] = std::sin(0.5 * M_PI * g.x(i));
  return ic;
}

std::vector<double> full_mode(const Grid& g) {
  std::vector<double> ic(g.nx);
  for (int i = 0; i < g.nx; ++i) ic[i] = std::sin(M_PI * g.x(i));
  return ic;
}

}  // namespace

TEST_CASE("one-peak reaction profile matches its closed form") {
  auto p = ReactionDiffusionParams::one_peak(1.0, 4.0, 2.0);
  // Peak value 2*eps*alpha^2 at x = beta/alpha.
  CHECK(lambda_profile(0.5, p) == doctest::Approx(32.0).epsilon(1e-15));
  CHECK(lambda_profile(0.0, p) == doctest::Approx(2.260826395301262902).epsilon(1e-14));
  auto c = ReactionDiffusionParams::constant(1.0, 12.0);
  CHECK(lambda_profile(0.3, c) == 12.0);
}

TEST_CASE("pure diffusion damps the slowest Neumann mode at the analytic rate") {
  // u = sin(pi x / 2) is an eigenfunction of u(0)=0, u_x(1)=0 with
  // eigenvalue -(pi/2)^2; after time T it scales by exp(-(pi/2)^2 T).
  Grid g(101, 0.01, 2500, 4e-5);  // CFL number 0.4
  auto params = ReactionDiffusionParams::constant(1.0, 0.0);
  auto ic = half_mode(g);
  const double T = g.nt * g.dt;
  const double decay = std::exp(-0.25 * M_PI * M_PI * T);

  for (RdScheme scheme : {RdScheme::Explicit, RdScheme::ImplicitEuler}) {
    auto traj = simulate_reaction_diffusion(ic, params, g, scheme);
    double worst = 0.0;
    for (int i = 1; i < g.nx; ++i) {
      const double want = decay * ic[i];
      worst = std::max(worst, std::abs(traj.at(0, g.nt, i) - want));
    }
    // First-order-in-time implicit Euler carries the larger constant.
    CHECK(worst < (scheme == RdScheme::Explicit ? 2e-4 : 5e-4));
  }
}

TEST_CASE("pinned right end damps the full sine mode at the analytic rate") {
  Grid g(101, 0.01, 2500, 4e-5);
  auto params = ReactionDiffusionParams::constant(1.0, 0.0);
  params.right_bc = RightBc::DirichletZero;
  auto ic = full_mode(g);
  const double T = g.nt * g.dt;
  const double decay = std::exp(-M_PI * M_PI * T);
  auto traj = simulate_reaction_diffusion(ic, params, g, RdScheme::ImplicitEuler);
  double worst = 0.0;
  for (int i = 0; i < g.nx; ++i)
    worst = std::max(worst, std::abs(traj.at(0, g.nt, i) - decay * ic[i]));
  CHECK(worst < 2e-3);
  CHECK(traj.at(0, g.nt, g.nx - 1) == 0.0);
}

TEST_CASE("supercritical constant reaction grows the pinned mode") {
  // With lambda = 12 > pi^2 the full sine mode grows like exp((12 - pi^2) t).
  Grid g(51, 0.02, 100, 0.006);
  auto params = ReactionDiffusionParams::constant(1.0, 12.0);
  params.right_bc = RightBc::DirichletZero;
  auto ic = full_mode(g);
  auto traj = simulate_reaction_diffusion(ic, params, g, RdScheme::ImplicitEuler);
  const double T = g.nt * g.dt;
  const double growth = std::exp((12.0 - M_PI * M_PI) * T);
  const double mid = traj.at(0, g.nt, 25);
  CHECK(mid > 1.5);  // strictly unstable
  CHECK(mid == doctest::Approx(growth * ic[25]).epsilon(0.08));
}

TEST_CASE("explicit scheme rejects CFL violations, implicit accepts them") {
  Grid g(51, 0.02, 10, 0.01);  // eps*dt/dx^2 = 25
  auto params = ReactionDiffusionParams::constant(1.0, 0.0);
  std::vector<double> ic(g.nx, 0.0);
  CHECK_THROWS_AS(simulate_reaction_diffusion(ic, params, g, RdScheme::Explicit),
                  CflViolation);
  CHECK_NOTHROW(simulate_reaction_diffusion(ic, params, g, RdScheme::ImplicitEuler));
}

TEST_CASE("initial conditions must satisfy the left boundary and the grid") {
  Grid g(51, 0.02, 10, 1e-4);
  auto params = ReactionDiffusionParams::constant(1.0, 0.0);
  std::vector<double> bad(g.nx, 0.0);
  bad[0] = 0.1;
  CHECK_THROWS_AS(simulate_reaction_diffusion(bad, params, g, RdScheme::Explicit),
                  IncompatibleIc);
  std::vector<double> wrong_len(g.nx + 1, 0.0);
  CHECK_THROWS_AS(simulate_reaction_diffusion(wrong_len, params, g, RdScheme::Explicit),
                  GridMismatch);
}

TEST_CASE("level zero stores the initial condition bit-exactly") {
  Grid g(31, 1.0 / 30, 5, 1e-4);
  auto params = ReactionDiffusionParams::one_peak(1.0, 4.0, 2.0);
  auto ic = half_mode(g);
  auto traj = simulate_reaction_diffusion(ic, params, g, RdScheme::Explicit);
  for (int i = 0; i < g.nx; ++i) CHECK(traj.at(0, 0, i) == ic[i]);
}

TEST_CASE("schemes agree on the one-peak plant under time refinement") {
  auto params = ReactionDiffusionParams::one_peak(1.0, 4.0, 2.0);
  Grid coarse(51, 0.02, 625, 2e-4);    // T = 0.125
  Grid fine(51, 0.02, 2500, 5e-5);     // same T, dt/4
  auto ic = half_mode(coarse);
  auto ex = simulate_reaction_diffusion(ic, params, fine, RdScheme::Explicit);
  auto im_c = simulate_reaction_diffusion(ic, params, coarse, RdScheme::ImplicitEuler);
  auto im_f = simulate_reaction_diffusion(ic, params, fine, RdScheme::ImplicitEuler);
  double err_c = 0.0, err_f = 0.0;
  for (int i = 0; i < 51; ++i) {
    err_c = std::max(err_c, std::abs(im_c.at(0, coarse.nt, i) - ex.at(0, fine.nt, i)));
    err_f = std::max(err_f, std::abs(im_f.at(0, fine.nt, i) - ex.at(0, fine.nt, i)));
  }
  CHECK(err_c < 0.05);
  // First order in dt: quartering the step shrinks the gap by about 4.
  CHECK(err_f < 0.4 * err_c);
}

TEST_CASE("implicit operator solves against a direct residual check") {
  Grid g(21, 0.05, 1, 1e-3);
  auto params = ReactionDiffusionParams::one_peak(1.0, 4.0, 2.0);
  rd_detail::ImplicitOperator op(g.nx, g.dx, g.dt, params);
  std::vector<double> u(g.nx), out(g.nx);
  for (int i = 0; i < g.nx; ++i) u[i] = std::sin(0.5 * M_PI * g.x(i));
  op.solve(u.data(), out.data(), nullptr);
  CHECK(out[0] == 0.0);
  // Residual of B*out = u, with B = I - dt(eps D2 + diag(lambda)); the
  // last row uses the ghost-point Neumann closure.
  const double r = params.epsilon * g.dt / (g.dx * g.dx);
  for (int i = 1; i < g.nx; ++i) {
    double lhs;
    const double lam = lambda_profile(g.x(i), params);
    if (i < g.nx - 1)
      lhs = -r * out[i - 1] + (1.0 + 2.0 * r - g.dt * lam) * out[i] - r * out[i + 1];
    else
      lhs = -2.0 * r * out[i - 1] + (1.0 + 2.0 * r - g.dt * lam) * out[i];
    CHECK(lhs == doctest::Approx(u[i]).epsilon(1e-12));
  }
}
