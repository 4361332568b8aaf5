#pragma once

#include "nobs/tensor.hpp"

namespace nobs {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One slot per parameter tensor, flat over storage (complex weights update
// their re/im slots independently).
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long step = 0;

  static AdamState for_param(const Tensor& p);
};

// In-place update with bias correction:
//   m <- b1 m + (1-b1) g,  v <- b2 v + (1-b2) g^2
//   p <- p - lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
void adam_step(Tensor& param, const Tensor& grad, AdamState& state,
               const AdamConfig& cfg);

}  // namespace nobs
