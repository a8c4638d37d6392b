#include "dynframe/kernels.hpp"

namespace dynframe::kernels::scalar {

Complex cdotc(std::span<const Complex> x, std::span<const Complex> y) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    const double yr = y[i].real(), yi = y[i].imag();
    re += xr * yr + xi * yi;
    im += xi * yr - xr * yi;
  }
  return {re, im};
}

void caxpy(Complex a, std::span<const Complex> x, std::span<Complex> y) {
  const double ar = a.real(), ai = a.imag();
  for (std::size_t i = 0; i < x.size(); ++i) {
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

}  // namespace dynframe::kernels::scalar
