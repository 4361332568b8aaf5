#pragma once

#include <vector>

#include "nobs/dataset.hpp"
#include "nobs/fno.hpp"
#include "nobs/grid.hpp"

namespace nobs {

// Flattened over all components, levels and points:
// ||est - ref||_2 / ||ref||_2. ZeroReference if the reference vanishes.
double relative_l2(const Trajectory& est, const Trajectory& ref);
double relative_l2(const std::vector<double>& est, const std::vector<double>& ref);

// Spatial L2 norm of the estimation error per time level, components
// combined; the raw material of error-evolution plots.
std::vector<double> error_l2_series(const Trajectory& est, const Trajectory& ref);

struct EvalReport {
  double mean_rel_l2 = 0.0;
  std::vector<double> per_record;
};

EvalReport evaluate(const FnoModel& m, const Dataset& test);

}  // namespace nobs
