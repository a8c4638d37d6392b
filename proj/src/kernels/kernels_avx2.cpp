// Compiled with -mavx2 -mfma. Nothing in here may be called unless
// avx2_available() returned true. No Eigen headers are included so that no
// inline template gets instantiated with the wider ISA and leaks through ODR.

#include "dynframe/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#define DYNFRAME_AVX2_BODY 1
#endif

namespace dynframe::kernels::avx2 {

#ifdef DYNFRAME_AVX2_BODY

namespace {

inline const double* as_doubles(const Complex* p) { return reinterpret_cast<const double*>(p); }
inline double* as_doubles(Complex* p) { return reinterpret_cast<double*>(p); }

// Two complex numbers per register: [re0, im0, re1, im1].
inline __m256d cmul_lanes(__m256d x, __m256d a_re, __m256d a_im) {
  const __m256d swapped = _mm256_permute_pd(x, 0x5);
  return _mm256_fmaddsub_pd(x, a_re, _mm256_mul_pd(swapped, a_im));
}

}  // namespace

Complex cdotc(std::span<const Complex> x, std::span<const Complex> y) {
  const std::size_t n = x.size();
  const double* xp = as_doubles(x.data());
  const double* yp = as_doubles(y.data());
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xp + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yp + 2 * i);
    const __m256d y_re = _mm256_movedup_pd(yv);
    const __m256d y_im = _mm256_permute_pd(yv, 0xF);
    acc_re = _mm256_fmadd_pd(xv, y_re, acc_re);
    acc_im = _mm256_fmadd_pd(_mm256_permute_pd(xv, 0x5), y_im, acc_im);
  }
  // even lanes: xr*yr + xi*yi, odd lanes: xi*yr - xr*yi
  const __m256d combined = _mm256_addsub_pd(acc_re, _mm256_sub_pd(_mm256_setzero_pd(), acc_im));
  const __m128d lo = _mm256_castpd256_pd128(combined);
  const __m128d hi = _mm256_extractf128_pd(combined, 1);
  alignas(16) double out[2];
  _mm_store_pd(out, _mm_add_pd(lo, hi));
  double re = out[0];
  double im = out[1];
  for (; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    re += xr * yr + xi * yi;
    im += xi * yr - xr * yi;
  }
  return {re, im};
}

void caxpy(Complex a, std::span<const Complex> x, std::span<Complex> y) {
  const std::size_t n = x.size();
  const double* xp = as_doubles(x.data());
  double* yp = as_doubles(y.data());
  const __m256d a_re = _mm256_set1_pd(a.real());
  const __m256d a_im = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x0 = _mm256_loadu_pd(xp + 2 * i);
    const __m256d x1 = _mm256_loadu_pd(xp + 2 * i + 4);
    const __m256d y0 = _mm256_loadu_pd(yp + 2 * i);
    const __m256d y1 = _mm256_loadu_pd(yp + 2 * i + 4);
    _mm256_storeu_pd(yp + 2 * i, _mm256_add_pd(y0, cmul_lanes(x0, a_re, a_im)));
    _mm256_storeu_pd(yp + 2 * i + 4, _mm256_add_pd(y1, cmul_lanes(x1, a_re, a_im)));
  }
  for (; i + 2 <= n; i += 2) {
    const __m256d x0 = _mm256_loadu_pd(xp + 2 * i);
    const __m256d y0 = _mm256_loadu_pd(yp + 2 * i);
    _mm256_storeu_pd(yp + 2 * i, _mm256_add_pd(y0, cmul_lanes(x0, a_re, a_im)));
  }
  const double ar = a.real(), ai = a.imag();
  for (; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] = Complex(y[i].real() + ar * xr - ai * xi, y[i].imag() + ar * xi + ai * xr);
  }
}

void cgemv(const Complex* a, std::size_t rows, std::size_t cols,
           std::span<const Complex> x, std::span<Complex> y) {
  for (std::size_t i = 0; i < rows; ++i) y[i] = Complex(0.0, 0.0);
  for (std::size_t j = 0; j < cols; ++j) {
    caxpy(x[j], {a + j * rows, rows}, y);
  }
}

void gram_update(std::span<const Complex> x, Complex* s) {
  const std::size_t n = x.size();
  for (std::size_t j = 0; j < n; ++j) {
    caxpy(std::conj(x[j]), x, {s + j * n, n});
  }
}

#else  // built without AVX2 support: forward to the reference kernels

Complex cdotc(std::span<const Complex> x, std::span<const Complex> y) { return scalar::cdotc(x, y); }
void caxpy(Complex a, std::span<const Complex> x, std::span<Complex> y) { scalar::caxpy(a, x, y); }
void cgemv(const Complex* a, std::size_t rows, std::size_t cols,
           std::span<const Complex> x, std::span<Complex> y) {
  scalar::cgemv(a, rows, cols, x, y);
}
void gram_update(std::span<const Complex> x, Complex* s) { scalar::gram_update(x, s); }

#endif

}  // namespace dynframe::kernels::avx2
