#include "nobs/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace nobs::fft {
namespace {

// FFTW planning is not thread-safe; execution of a cached plan on fresh
// buffers via the *_dft variants is. One global cache, guarded.
std::mutex g_mutex;

enum class Kind { C2CFwd, C2CInv, R2C, C2R };

using Key = std::tuple<Kind, int, int>;  // kind, n, batch

std::map<Key, fftw_plan>& cache() {
  static std::map<Key, fftw_plan> c;
  return c;
}

fftw_plan plan_for(Kind kind, int n, int batch, fftw_complex* cin, fftw_complex* cout,
                   double* rin, double* rout) {
  Key key{kind, n, batch};
  auto& c = cache();
  auto it = c.find(key);
  if (it != c.end()) return it->second;
  fftw_plan p = nullptr;
  switch (kind) {
    case Kind::C2CFwd:
      p = fftw_plan_many_dft(1, &n, batch, cin, nullptr, 1, n, cout, nullptr, 1, n,
                             FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
      break;
    case Kind::C2CInv:
      p = fftw_plan_many_dft(1, &n, batch, cin, nullptr, 1, n, cout, nullptr, 1, n,
                             FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
      break;
    case Kind::R2C:
      p = fftw_plan_many_dft_r2c(1, &n, batch, rin, nullptr, 1, n, cout, nullptr, 1,
                                 onesided(n), FFTW_ESTIMATE | FFTW_UNALIGNED);
      break;
    case Kind::C2R:
      p = fftw_plan_many_dft_c2r(1, &n, batch, cin, nullptr, 1, onesided(n), rout, nullptr, 1,
                                 n, FFTW_ESTIMATE | FFTW_UNALIGNED);
      break;
  }
  c.emplace(key, p);
  return p;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

void forward_c2c(const std::complex<double>* in, std::complex<double>* out, int n, int batch) {
  std::vector<std::complex<double>> tmp(in, in + static_cast<std::size_t>(n) * batch);
  std::lock_guard<std::mutex> lk(g_mutex);
  fftw_plan p = plan_for(Kind::C2CFwd, n, batch, as_fftw(tmp.data()), as_fftw(out), nullptr,
                         nullptr);
  fftw_execute_dft(p, as_fftw(tmp.data()), as_fftw(out));
}

void inverse_c2c(const std::complex<double>* in, std::complex<double>* out, int n, int batch) {
  std::vector<std::complex<double>> tmp(in, in + static_cast<std::size_t>(n) * batch);
  {
    std::lock_guard<std::mutex> lk(g_mutex);
    fftw_plan p = plan_for(Kind::C2CInv, n, batch, as_fftw(tmp.data()), as_fftw(out), nullptr,
                           nullptr);
    fftw_execute_dft(p, as_fftw(tmp.data()), as_fftw(out));
  }
  const double inv = 1.0 / n;
  for (std::size_t i = 0; i < static_cast<std::size_t>(n) * batch; ++i) out[i] *= inv;
}

void forward_r2c(const double* in, std::complex<double>* out, int n, int batch) {
  std::vector<double> tmp(in, in + static_cast<std::size_t>(n) * batch);
  std::lock_guard<std::mutex> lk(g_mutex);
  fftw_plan p = plan_for(Kind::R2C, n, batch, nullptr, as_fftw(out), tmp.data(), nullptr);
  fftw_execute_dft_r2c(p, tmp.data(), as_fftw(out));
}

void inverse_c2r(const std::complex<double>* in, double* out, int n, int batch) {
  // c2r clobbers its input, so the copy is load-bearing here.
  std::vector<std::complex<double>> tmp(in, in + static_cast<std::size_t>(onesided(n)) * batch);
  {
    std::lock_guard<std::mutex> lk(g_mutex);
    fftw_plan p = plan_for(Kind::C2R, n, batch, as_fftw(tmp.data()), nullptr, nullptr, out);
    fftw_execute_dft_c2r(p, as_fftw(tmp.data()), out);
  }
  const double inv = 1.0 / n;
  for (std::size_t i = 0; i < static_cast<std::size_t>(n) * batch; ++i) out[i] *= inv;
}

}  // namespace nobs::fft
