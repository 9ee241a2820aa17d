#pragma once

#include <complex>
#include <cstddef>

// Array kernels under the wavefunction simulator. Two implementations with
// identical signatures: kernels::serial is the reference, kernels::par is
// OpenMP-parallel (and falls back to the serial loops when built without
// OpenMP). The dispatch wrappers at namespace scope pick par only when more
// than one thread is configured.
//
// Bitwise contract: for the same inputs, serial and par produce identical
// bytes at any thread count. Elementwise kernels get this for free; scalar
// reductions and column sums accumulate fixed-size chunks (kChunk) into
// partials that are combined in index order, so the summation tree never
// depends on scheduling.

namespace cvnl::kernels {

inline constexpr int kChunk = 256;

using cplx = std::complex<double>;

int max_threads();
void set_max_threads(int n);

#define CVNL_KERNEL_SET                                                        \
  /* a_j *= exp(i * (c[0] + c[1] x_j + ... + c[deg] x_j^deg)), x_j = x0+j*dx */\
  void phase_poly(cplx* a, int n, double x0, double dx, const double* c,       \
                  int deg);                                                    \
  /* m(i,j) *= exp(i * rv[i] * cv[j]); row-major rows x cols */                \
  void mul_outer(cplx* m, int rows, int cols, const double* rv,                \
                 const double* cv);                                            \
  void mul_rows(cplx* m, int rows, int cols, const cplx* f);                   \
  void mul_cols(cplx* m, int rows, int cols, const cplx* f);                   \
  /* unnormalized forward DFT per contiguous row; backward applies 1/n */     \
  void dft_rows(cplx* m, int rows, int n, bool forward);                       \
  void transpose(const cplx* in, cplx* out, int rows, int cols);               \
  void abs2_rows(const cplx* m, int rows, int cols, double* out);              \
  void abs2_cols(const cplx* m, int rows, int cols, double* out);              \
  double abs2_sum(const cplx* a, int n);                                       \
  /* sum_j x_j^p |a_j|^2 */                                                    \
  double weighted_abs2(const cplx* a, int n, double x0, double dx, int p);     \
  /* sum_j conj(a_j) b_j */                                                    \
  cplx dot(const cplx* a, const cplx* b, int n);                               \
  void scale(cplx* a, int n, double s);                                        \
  /* out(i,c) = sum_j A(i,j) D(c,j); D row-major out_cols x cols */            \
  void matmul_realT(const cplx* A, const double* D, cplx* out, int rows,       \
                    int cols, int out_cols);                                   \
  /* y_i = sum_j K(i,j) x_j; K row-major ny x nx */                            \
  void real_matvec(const double* K, const double* x, double* y, int ny,        \
                   int nx);

namespace serial {
CVNL_KERNEL_SET
}
namespace par {
CVNL_KERNEL_SET
}

#undef CVNL_KERNEL_SET

inline bool use_par() { return max_threads() > 1; }

inline void phase_poly(cplx* a, int n, double x0, double dx, const double* c,
                       int deg) {
  use_par() ? par::phase_poly(a, n, x0, dx, c, deg)
            : serial::phase_poly(a, n, x0, dx, c, deg);
}
inline void mul_outer(cplx* m, int rows, int cols, const double* rv,
                      const double* cv) {
  use_par() ? par::mul_outer(m, rows, cols, rv, cv)
            : serial::mul_outer(m, rows, cols, rv, cv);
}
inline void mul_rows(cplx* m, int rows, int cols, const cplx* f) {
  use_par() ? par::mul_rows(m, rows, cols, f) : serial::mul_rows(m, rows, cols, f);
}
inline void mul_cols(cplx* m, int rows, int cols, const cplx* f) {
  use_par() ? par::mul_cols(m, rows, cols, f) : serial::mul_cols(m, rows, cols, f);
}
inline void dft_rows(cplx* m, int rows, int n, bool forward) {
  use_par() ? par::dft_rows(m, rows, n, forward)
            : serial::dft_rows(m, rows, n, forward);
}
inline void transpose(const cplx* in, cplx* out, int rows, int cols) {
  use_par() ? par::transpose(in, out, rows, cols)
            : serial::transpose(in, out, rows, cols);
}
inline void abs2_rows(const cplx* m, int rows, int cols, double* out) {
  use_par() ? par::abs2_rows(m, rows, cols, out)
            : serial::abs2_rows(m, rows, cols, out);
}
inline void abs2_cols(const cplx* m, int rows, int cols, double* out) {
  use_par() ? par::abs2_cols(m, rows, cols, out)
            : serial::abs2_cols(m, rows, cols, out);
}
inline double abs2_sum(const cplx* a, int n) {
  return use_par() ? par::abs2_sum(a, n) : serial::abs2_sum(a, n);
}
inline double weighted_abs2(const cplx* a, int n, double x0, double dx,
                            int p) {
  return use_par() ? par::weighted_abs2(a, n, x0, dx, p)
                   : serial::weighted_abs2(a, n, x0, dx, p);
}
inline cplx dot(const cplx* a, const cplx* b, int n) {
  return use_par() ? par::dot(a, b, n) : serial::dot(a, b, n);
}
inline void scale(cplx* a, int n, double s) {
  use_par() ? par::scale(a, n, s) : serial::scale(a, n, s);
}
inline void matmul_realT(const cplx* A, const double* D, cplx* out, int rows,
                         int cols, int out_cols) {
  use_par() ? par::matmul_realT(A, D, out, rows, cols, out_cols)
            : serial::matmul_realT(A, D, out, rows, cols, out_cols);
}
inline void real_matvec(const double* K, const double* x, double* y, int ny,
                        int nx) {
  use_par() ? par::real_matvec(K, x, y, ny, nx)
            : serial::real_matvec(K, x, y, ny, nx);
}

}  // namespace cvnl::kernels
