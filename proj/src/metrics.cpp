#include "nobs/metrics.hpp"

#include <cmath>

#include "nobs/errors.hpp"

namespace nobs {

double relative_l2(const std::vector<double>& est, const std::vector<double>& ref) {
  if (est.size() != ref.size()) throw ShapeMismatch("relative_l2: lengths differ");
  double sd = 0.0, sr = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double d = est[i] - ref[i];
    sd += d * d;
    sr += ref[i] * ref[i];
  }
  if (!(sr > 0.0)) throw ZeroReference("relative_l2: reference is identically zero");
  return std::sqrt(sd) / std::sqrt(sr);
}

double relative_l2(const Trajectory& est, const Trajectory& ref) {
  if (!(est.grid == ref.grid) || est.components != ref.components)
    throw GridMismatch("relative_l2: trajectories live on different grids");
  return relative_l2(est.values, ref.values);
}

std::vector<double> error_l2_series(const Trajectory& est, const Trajectory& ref) {
  if (!(est.grid == ref.grid) || est.components != ref.components)
    throw GridMismatch("error_l2_series: trajectories live on different grids");
  const Grid& g = est.grid;
  std::vector<double> series(g.n_levels(), 0.0);
  std::vector<double> diff(g.nx);
  for (std::size_t k = 0; k < g.n_levels(); ++k) {
    double sq = 0.0;
    for (int c = 0; c < est.components; ++c) {
      const int ki = static_cast<int>(k);
      for (int i = 0; i < g.nx; ++i) diff[i] = est.at(c, ki, i) - ref.at(c, ki, i);
      const double nc = spatial_l2(diff.data(), g.nx, g.dx);
      sq += nc * nc;
    }
    series[k] = std::sqrt(sq);
  }
  return series;
}

EvalReport evaluate(const FnoModel& m, const Dataset& test) {
  EvalReport rep;
  rep.per_record.reserve(test.records.size());
  double sum = 0.0;
  for (const auto& rec : test.records) {
    const Trajectory est = m.kind == FnoKind::Feedforward
                               ? feedforward_predict(m, rec, test.grid)
                               : recurrent_predict(m, rec, test.grid);
    const double e = relative_l2(est, rec.target);
    rep.per_record.push_back(e);
    sum += e;
  }
  rep.mean_rel_l2 = test.records.empty() ? 0.0 : sum / test.records.size();
  return rep;
}

}  // namespace nobs
