#include "nobs/ic_sampler.hpp"

#include <cmath>

#include "nobs/rng.hpp"

namespace nobs {

namespace {

// Counter layout within a record's stream: mode amplitudes draw normals on
// counters [0, K), which occupy raw slots [0, 2K). Scalar draws elsewhere in
// the codebase start at raw counter 1<<20 and never collide.
std::vector<double> sine_sum(const IcSpec& spec, std::uint64_t stream, const Grid& grid,
                             double mode_offset) {
  std::vector<double> u(grid.nx, 0.0);
  for (int k = 1; k <= spec.K; ++k) {
    const double sd = std::pow(static_cast<double>(k), -0.5 * spec.decay);
    const double a = sd * rng::normal(spec.seed, stream, static_cast<std::uint64_t>(k - 1));
    const double freq = (static_cast<double>(k) - mode_offset) * M_PI;
    for (int i = 0; i < grid.nx; ++i) u[i] += a * std::sin(freq * grid.x(i));
  }
  return u;
}

}  // namespace

std::vector<double> sample_ic_sine(const IcSpec& spec, std::uint64_t record_index,
                                   const Grid& grid) {
  // Half-integer modes: zero value at x=0, zero slope at x=1.
  return sine_sum(spec, 2 * record_index, grid, 0.5);
}

std::vector<double> sample_ic_sine_dirichlet(const IcSpec& spec, std::uint64_t record_index,
                                             const Grid& grid) {
  return sine_sum(spec, 2 * record_index, grid, 0.0);
}

std::pair<std::vector<double>, std::vector<double>> sample_ic_traffic(
    const IcSpec& spec, std::uint64_t record_index, const ArzParams& params,
    const Grid& grid) {
  const double L = grid.x_max();
  auto bump = [&](std::uint64_t stream) {
    std::vector<double> g(grid.nx, 0.0);
    double c[3], abs_sum = 0.0;
    for (int k = 0; k < 3; ++k) {
      c[k] = std::pow(k + 1.0, -2.0) *
             rng::normal(spec.seed, stream, static_cast<std::uint64_t>(k));
      abs_sum += std::abs(c[k]);
    }
    // Normalized so |g| <= 1; the relative amplitudes then bound the
    // perturbation and keep the state positive.
    const double scale = abs_sum > 1.0 ? 1.0 / abs_sum : 1.0;
    for (int i = 0; i < grid.nx; ++i) {
      const double xi = grid.x(i) / L;
      for (int k = 0; k < 3; ++k) g[i] += scale * c[k] * std::sin((k + 1) * M_PI * xi);
    }
    return g;
  };
  const auto grho = bump(2 * record_index);
  const auto gv = bump(2 * record_index + 1);
  std::vector<double> rho(grid.nx), v(grid.nx);
  for (int i = 0; i < grid.nx; ++i) {
    rho[i] = params.rho_star * (1.0 + spec.amp_rho * grho[i]);
    v[i] = params.v_star * (1.0 + spec.amp_v * gv[i]);
  }
  return {rho, v};
}

}  // namespace nobs
