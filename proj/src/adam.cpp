#include "nobs/adam.hpp"

#include <cmath>

#include "nobs/errors.hpp"

namespace nobs {

AdamState AdamState::for_param(const Tensor& p) {
  AdamState s;
  s.m.assign(p.storage(), 0.0);
  s.v.assign(p.storage(), 0.0);
  return s;
}

void adam_step(Tensor& param, const Tensor& grad, AdamState& state, const AdamConfig& cfg) {
  if (param.storage() != grad.storage() ||
      state.m.size() != static_cast<std::size_t>(param.storage()))
    throw ShapeMismatch("adam_step: parameter, gradient and state sizes differ");
  state.step += 1;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (long i = 0; i < param.storage(); ++i) {
    const double g = grad.data[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
    const double mhat = state.m[i] / c1;
    const double vhat = state.v[i] / c2;
    param.data[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

}  // namespace nobs
