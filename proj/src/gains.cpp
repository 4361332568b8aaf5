#include "nobs/gains.hpp"

#include <cmath>

#include "nobs/errors.hpp"

namespace nobs {

double gain_exponential(double x, double alpha, double beta, double epsilon) {
  const double tb = std::tanh(beta);
  return epsilon * alpha * alpha * tb * (tb - std::tanh(beta - alpha * x)) *
         std::exp((1.0 - x) * alpha * tb);
}

ExponentialGain ExponentialGain::sample(double alpha, double beta, double epsilon,
                                        const Grid& grid) {
  ExponentialGain g;
  g.alpha = alpha;
  g.beta = beta;
  g.epsilon = epsilon;
  g.sampled.resize(grid.nx);
  for (int i = 0; i < grid.nx; ++i)
    g.sampled[i] = gain_exponential(grid.x(i), alpha, beta, epsilon);
  return g;
}

namespace {

long long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;  // exact: r*(n-k+i) divisible by i
  return r;
}

}  // namespace

double gain_prescribed_time(double x, double t, const PrescribedTimeGain& cfg) {
  if (!(t >= 0.0) || t >= cfg.clamp)
    throw TimeOutOfRange("gain evaluation outside [0, clamp)");
  const double T = cfg.T_horizon;
  const double rem = T - t;
  const double pref = cfg.mu * T * T * T * x / (2.0 * rem * rem * rem);
  const double a = (1.0 - x * x) / (4.0 * rem);
  const double b = -cfg.mu * T * T * T / (2.0 * rem * rem);
  double sum = 0.0;
  double a_pow = 1.0;       // a^n
  double fact_np1 = 1.0;    // (n+1)!
  double sign = 1.0;        // (-1)^n
  for (int n = 0; n < cfg.n_terms; ++n) {
    fact_np1 *= n + 1;
    double inner = 0.0;
    double b_pow = 1.0;   // b^j
    double fact_j = 1.0;  // j!
    for (int j = 0; j <= n; ++j) {
      if (j > 0) {
        b_pow *= b;
        fact_j *= j;
      }
      double s3 = 0.0;
      for (int k = 0; k <= j; ++k)
        s3 += static_cast<double>(binom(j, k)) * static_cast<double>(binom(n + 2 + k, n - j));
      inner += b_pow / fact_j * s3;
    }
    sum += sign / fact_np1 * a_pow * inner;
    a_pow *= a;
    sign = -sign;
  }
  return pref * sum;
}

}  // namespace nobs
