#pragma once

#include <complex>

namespace cvnl::fft {

// In-place unnormalized c2c DFT of a contiguous length-n buffer.
// forward: X_j = sum_m x_m exp(-2 pi i j m / n); backward is the conjugate
// kernel, still unnormalized. Plans are FFTW_ESTIMATE | FFTW_UNALIGNED,
// cached per (n, direction) behind a mutex, and executed through the
// new-array interface, so concurrent calls from worker threads are safe
// and the result is bit-identical for a given n regardless of scheduling.
void dft(std::complex<double>* data, int n, bool forward);

// Opaque plan handle for hot loops: look the plan up once, execute many times
// without touching the cache lock.
using PlanHandle = void*;
PlanHandle plan_for(int n, bool forward);
void execute(PlanHandle plan, std::complex<double>* data);

}  // namespace cvnl::fft
