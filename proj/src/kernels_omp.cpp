#include "cvnl/kernels.hpp"

#include <cmath>
#include <vector>

#include "cvnl/fftw_wrap.hpp"

#ifdef CVNL_HAVE_OPENMP
#include <omp.h>
#endif

// Parallel twins of the kernels in kernels_serial.cpp. Work is split over
// rows / columns / fixed chunks, every partial is written to its own slot,
// and scalar combines happen serially in index order, so output bytes match
// the serial implementation at any thread count.

namespace cvnl::kernels::par {

#ifndef CVNL_HAVE_OPENMP

void phase_poly(cplx* a, int n, double x0, double dx, const double* c,
                int deg) {
  serial::phase_poly(a, n, x0, dx, c, deg);
}
void mul_outer(cplx* m, int rows, int cols, const double* rv,
               const double* cv) {
  serial::mul_outer(m, rows, cols, rv, cv);
}
void mul_rows(cplx* m, int rows, int cols, const cplx* f) {
  serial::mul_rows(m, rows, cols, f);
}
void mul_cols(cplx* m, int rows, int cols, const cplx* f) {
  serial::mul_cols(m, rows, cols, f);
}
void dft_rows(cplx* m, int rows, int n, bool forward) {
  serial::dft_rows(m, rows, n, forward);
}
void transpose(const cplx* in, cplx* out, int rows, int cols) {
  serial::transpose(in, out, rows, cols);
}
void abs2_rows(const cplx* m, int rows, int cols, double* out) {
  serial::abs2_rows(m, rows, cols, out);
}
void abs2_cols(const cplx* m, int rows, int cols, double* out) {
  serial::abs2_cols(m, rows, cols, out);
}
double abs2_sum(const cplx* a, int n) { return serial::abs2_sum(a, n); }
double weighted_abs2(const cplx* a, int n, double x0, double dx, int p) {
  return serial::weighted_abs2(a, n, x0, dx, p);
}
cplx dot(const cplx* a, const cplx* b, int n) { return serial::dot(a, b, n); }
void scale(cplx* a, int n, double s) { serial::scale(a, n, s); }
void matmul_realT(const cplx* A, const double* D, cplx* out, int rows,
                  int cols, int out_cols) {
  serial::matmul_realT(A, D, out, rows, cols, out_cols);
}
void real_matvec(const double* K, const double* x, double* y, int ny,
                 int nx) {
  serial::real_matvec(K, x, y, ny, nx);
}

#else

namespace {
inline double pow_int(double x, int p) {
  double w = 1.0;
  for (int k = 0; k < p; ++k) w *= x;
  return w;
}
}  // namespace

void phase_poly(cplx* a, int n, double x0, double dx, const double* c,
                int deg) {
  const int nt = max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
  for (int j = 0; j < n; ++j) {
    const double x = x0 + j * dx;
    double v = c[deg];
    for (int m = deg - 1; m >= 0; --m) v = v * x + c[m];
    a[j] *= cplx(std::cos(v), std::sin(v));
  }
}

void mul_outer(cplx* m, int rows, int cols, const double* rv,
               const double* cv) {
  const int nt = max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
  for (int i = 0; i < rows; ++i) {
    cplx* row = m + static_cast<std::size_t>(i) * cols;
    for (int j = 0; j < cols; ++j) {
      const double v = rv[i] * cv[j];
      row[j] *= cplx(std::cos(v), std::sin(v));
    }
  }
}

void mul_rows(cplx* m, int rows, int cols, const cplx* f) {
  const int nt = max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
  for (int i = 0; i < rows; ++i) {
    cplx* row = m + static_cast<std::size_t>(i) * cols;
    for (int j = 0; j < cols; ++j) row[j] *= f[i];
  }
}

void mul_cols(cplx* m, int rows, int cols, const cplx* f) {
  const int nt = max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
  for (int i = 0; i < rows; ++i) {
    cplx* row = m + static_cast<std::size_t>(i) * cols;
    for (int j = 0; j < cols; ++j) row[j] *= f[j];
  }
}

void dft_rows(cplx* m, int rows, int n, bool forward) {
  fft::PlanHandle plan = fft::plan_for(n, forward);
  const double inv = 1.0 / n;
  const int nt = max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
  for (int i = 0; i < rows; ++i) {
    cplx* row = m + static_cast<std::size_t>(i) * n;
    fft::execute(plan, row);
    if (!forward)
      for (int j = 0; j < n; ++j) row[j] *= inv;
  }
}

void transpose(const cplx* in, cplx* out, int rows, int cols) {
  const int nt = max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      out[static_cast<std::size_t>(j) * rows + i] =
          in[static_cast<std::size_t>(i) * cols + j];
}

void abs2_rows(const cplx* m, int rows, int cols, double* out) {
  const int nt = max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
  for (int i = 0; i < rows; ++i) {
    const cplx* row = m + static_cast<std::size_t>(i) * cols;
    double s = 0.0;
    for (int c0 = 0; c0 < cols; c0 += kChunk) {
      const int c1 = c0 + kChunk < cols ? c0 + kChunk : cols;
      double part = 0.0;
      for (int j = c0; j < c1; ++j) part += std::norm(row[j]);
      s += part;
    }
    out[i] = s;
  }
}

void abs2_cols(const cplx* m, int rows, int cols, double* out) {
  const int nt = max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
  for (int j = 0; j < cols; ++j) {
    double s = 0.0;
    for (int r0 = 0; r0 < rows; r0 += kChunk) {
      const int r1 = r0 + kChunk < rows ? r0 + kChunk : rows;
      double part = 0.0;
      for (int i = r0; i < r1; ++i)
        part += std::norm(m[static_cast<std::size_t>(i) * cols + j]);
      s += part;
    }
    out[j] = s;
  }
}

double abs2_sum(const cplx* a, int n) {
  const int nch = (n + kChunk - 1) / kChunk;
  std::vector<double> part(static_cast<std::size_t>(nch));
  const int nt = max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
  for (int c = 0; c < nch; ++c) {
    const int j0 = c * kChunk;
    const int j1 = j0 + kChunk < n ? j0 + kChunk : n;
    double s = 0.0;
    for (int j = j0; j < j1; ++j) s += std::norm(a[j]);
    part[c] = s;
  }
  double s = 0.0;
  for (int c = 0; c < nch; ++c) s += part[c];
  return s;
}

double weighted_abs2(const cplx* a, int n, double x0, double dx, int p) {
  const int nch = (n + kChunk - 1) / kChunk;
  std::vector<double> part(static_cast<std::size_t>(nch));
  const int nt = max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
  for (int c = 0; c < nch; ++c) {
    const int j0 = c * kChunk;
    const int j1 = j0 + kChunk < n ? j0 + kChunk : n;
    double s = 0.0;
    for (int j = j0; j < j1; ++j)
      s += pow_int(x0 + j * dx, p) * std::norm(a[j]);
    part[c] = s;
  }
  double s = 0.0;
  for (int c = 0; c < nch; ++c) s += part[c];
  return s;
}

cplx dot(const cplx* a, const cplx* b, int n) {
  const int nch = (n + kChunk - 1) / kChunk;
  std::vector<cplx> part(static_cast<std::size_t>(nch));
  const int nt = max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
  for (int c = 0; c < nch; ++c) {
    const int j0 = c * kChunk;
    const int j1 = j0 + kChunk < n ? j0 + kChunk : n;
    cplx s = 0.0;
    for (int j = j0; j < j1; ++j) s += std::conj(a[j]) * b[j];
    part[c] = s;
  }
  cplx s = 0.0;
  for (int c = 0; c < nch; ++c) s += part[c];
  return s;
}

void scale(cplx* a, int n, double s) {
  const int nt = max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
  for (int j = 0; j < n; ++j) a[j] *= s;
}

void matmul_realT(const cplx* A, const double* D, cplx* out, int rows,
                  int cols, int out_cols) {
  const int nt = max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
  for (int i = 0; i < rows; ++i) {
    const cplx* arow = A + static_cast<std::size_t>(i) * cols;
    cplx* orow = out + static_cast<std::size_t>(i) * out_cols;
    for (int c = 0; c < out_cols; ++c) {
      const double* drow = D + static_cast<std::size_t>(c) * cols;
      cplx s = 0.0;
      for (int j = 0; j < cols; ++j) s += arow[j] * drow[j];
      orow[c] = s;
    }
  }
}

void real_matvec(const double* K, const double* x, double* y, int ny,
                 int nx) {
  const int nt = max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
  for (int i = 0; i < ny; ++i) {
    const double* krow = K + static_cast<std::size_t>(i) * nx;
    double s = 0.0;
    for (int j = 0; j < nx; ++j) s += krow[j] * x[j];
    y[i] = s;
  }
}

#endif  // CVNL_HAVE_OPENMP

}  // namespace cvnl::kernels::par
