#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "nobs/fft.hpp"
#include "nobs/rng.hpp"

using namespace nobs;

namespace {

// Independent reference: textbook O(n^2) DFT with the same convention
// (forward unnormalized, inverse carries 1/n).
std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x,
                                            bool inverse) {
  const int n = static_cast<int>(x.size());
  std::vector<std::complex<double>> out(n);
  const double sign = inverse ? 1.0 : -1.0;
  for (int k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (int j = 0; j < n; ++j)
      acc += x[j] * std::polar(1.0, sign * 2.0 * M_PI * k * j / n);
    out[k] = inverse ? acc / static_cast<double>(n) : acc;
  }
  return out;
}

std::vector<std::complex<double>> random_signal(int n, std::uint64_t stream) {
  std::vector<std::complex<double>> x(n);
  for (int i = 0; i < n; ++i)
    x[i] = {rng::normal(99, stream, 2 * i), rng::normal(99, stream, 2 * i + 1)};
  return x;
}

}  // namespace

TEST_CASE("real transform of the 1..8 ramp matches the frozen reference bins") {
  const int n = 8;
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = i + 1.0;
  std::vector<std::complex<double>> out(fft::onesided(n));
  fft::forward_r2c(x.data(), out.data(), n, 1);

  const double s = 4.0 * std::sqrt(2.0);
  const std::complex<double> expect[5] = {
      {36.0, 0.0}, {-4.0, 4.0 + s}, {-4.0, 4.0}, {-4.0, s - 4.0}, {-4.0, 0.0}};
  for (int k = 0; k < 5; ++k) {
    CHECK(out[k].real() == doctest::Approx(expect[k].real()).epsilon(1e-13));
    CHECK(out[k].imag() == doctest::Approx(expect[k].imag()).epsilon(1e-13));
  }
}

TEST_CASE("real round trip recovers the signal for even and odd lengths") {
  for (int n : {8, 7, 51, 32}) {
    std::vector<double> x(n), back(n);
    for (int i = 0; i < n; ++i) x[i] = rng::normal(5, static_cast<std::uint64_t>(n), i);
    std::vector<std::complex<double>> spec(fft::onesided(n));
    fft::forward_r2c(x.data(), spec.data(), n, 1);
    fft::inverse_c2r(spec.data(), back.data(), n, 1);
    for (int i = 0; i < n; ++i) CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-12));
  }
}

TEST_CASE("complex transform agrees with a naive DFT both ways") {
  for (int n : {6, 13, 32}) {
    auto x = random_signal(n, static_cast<std::uint64_t>(n));
    std::vector<std::complex<double>> fwd(n), ref = naive_dft(x, false);
    fft::forward_c2c(x.data(), fwd.data(), n, 1);
    for (int k = 0; k < n; ++k) {
      CHECK(fwd[k].real() == doctest::Approx(ref[k].real()).epsilon(1e-10));
      CHECK(fwd[k].imag() == doctest::Approx(ref[k].imag()).epsilon(1e-10));
    }
    std::vector<std::complex<double>> inv(n), iref = naive_dft(x, true);
    fft::inverse_c2c(x.data(), inv.data(), n, 1);
    for (int k = 0; k < n; ++k) {
      CHECK(inv[k].real() == doctest::Approx(iref[k].real()).epsilon(1e-10));
      CHECK(inv[k].imag() == doctest::Approx(iref[k].imag()).epsilon(1e-10));
    }
  }
}

TEST_CASE("Parseval holds under the unnormalized-forward convention") {
  const int n = 24;
  auto x = random_signal(n, 77);
  std::vector<std::complex<double>> X(n);
  fft::forward_c2c(x.data(), X.data(), n, 1);
  double time_sq = 0.0, freq_sq = 0.0;
  for (int i = 0; i < n; ++i) time_sq += std::norm(x[i]);
  for (int k = 0; k < n; ++k) freq_sq += std::norm(X[k]);
  CHECK(time_sq == doctest::Approx(freq_sq / n).epsilon(1e-12));
}

TEST_CASE("batched transforms equal per-row transforms") {
  const int n = 16, batch = 3;
  std::vector<double> x(batch * n);
  for (int i = 0; i < batch * n; ++i) x[i] = rng::normal(11, 4, i);
  std::vector<std::complex<double>> all(batch * fft::onesided(n));
  fft::forward_r2c(x.data(), all.data(), n, batch);
  for (int b = 0; b < batch; ++b) {
    std::vector<std::complex<double>> one(fft::onesided(n));
    fft::forward_r2c(x.data() + b * n, one.data(), n, 1);
    for (int k = 0; k < fft::onesided(n); ++k) {
      CHECK(all[b * fft::onesided(n) + k].real() == doctest::Approx(one[k].real()));
      CHECK(all[b * fft::onesided(n) + k].imag() == doctest::Approx(one[k].imag()));
    }
  }
}

TEST_CASE("transforms are linear") {
  const int n = 20;
  auto x = random_signal(n, 1);
  auto y = random_signal(n, 2);
  std::vector<std::complex<double>> sum(n), fx(n), fy(n), fsum(n);
  for (int i = 0; i < n; ++i) sum[i] = 2.0 * x[i] + y[i];
  fft::forward_c2c(x.data(), fx.data(), n, 1);
  fft::forward_c2c(y.data(), fy.data(), n, 1);
  fft::forward_c2c(sum.data(), fsum.data(), n, 1);
  for (int k = 0; k < n; ++k) {
    const std::complex<double> want = 2.0 * fx[k] + fy[k];
    CHECK(fsum[k].real() == doctest::Approx(want.real()).epsilon(1e-12));
    CHECK(fsum[k].imag() == doctest::Approx(want.imag()).epsilon(1e-12));
  }
}
