#pragma once

#include <complex>

namespace nobs::fft {

// Convention (frozen): forward transforms are unnormalized, inverse
// transforms carry the 1/n factor. All routines transform the contiguous
// last axis of a [batch, n] layout; plans are cached per (kind, n, batch).

void forward_c2c(const std::complex<double>* in, std::complex<double>* out, int n, int batch);
void inverse_c2c(const std::complex<double>* in, std::complex<double>* out, int n, int batch);

// Real-to-complex, one-sided: n reals -> n/2+1 bins.
void forward_r2c(const double* in, std::complex<double>* out, int n, int batch);
// One-sided inverse, includes 1/n. Input is copied internally (the planner
// clobbers c2r inputs).
void inverse_c2r(const std::complex<double>* in, double* out, int n, int batch);

inline int onesided(int n) { return n / 2 + 1; }

}  // namespace nobs::fft
