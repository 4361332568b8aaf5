#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "nobs/arz.hpp"
#include "nobs/grid.hpp"

namespace nobs {

enum class IcFamily { SineModes, TrafficPerturbation };

struct IcSpec {
  IcFamily family = IcFamily::SineModes;
  std::uint64_t seed = 0;
  // SineModes: sum_{k=1..K} a_k sin((k - 1/2) pi x), a_k ~ N(0, k^-decay).
  int K = 8;
  double decay = 2.0;
  // TrafficPerturbation: relative bump amplitudes on (rho*, v*).
  double amp_rho = 0.05;
  double amp_v = 0.05;
};

// Deterministic: the draw is a pure function of (spec.seed, record_index).
std::vector<double> sample_ic_sine(const IcSpec& spec, std::uint64_t record_index,
                                   const Grid& grid);

// Full-sine variant sum a_k sin(k pi x), vanishing at both ends; serves the
// pinned-right-end plant family.
std::vector<double> sample_ic_sine_dirichlet(const IcSpec& spec, std::uint64_t record_index,
                                             const Grid& grid);

// Smooth positive perturbation around the reference state.
std::pair<std::vector<double>, std::vector<double>> sample_ic_traffic(
    const IcSpec& spec, std::uint64_t record_index, const ArzParams& params, const Grid& grid);

}  // namespace nobs
