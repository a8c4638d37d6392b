#pragma once

// Complex BLAS-1/2 style inner loops used on the hot paths (orbit generation,
// frame-operator accumulation, sample tables). Each kernel has a portable
// scalar reference and an AVX2/FMA variant; the variant is chosen once at
// runtime from cpuid and can be pinned with DYNFRAME_SIMD=scalar|avx2.
//
// Storage is column-major, matching Eigen's default layout, so callers pass
// `matrix.data()` directly.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace dynframe::kernels {

using Complex = std::complex<double>;

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

/// True when the AVX2 variant was compiled in and the CPU supports it.
bool avx2_available();

/// The variant currently used by the dispatching entry points.
Isa active_isa();

/// Pin the dispatching entry points to one variant. Requests for an
/// unavailable variant fall back to Scalar. Returns the variant in effect.
Isa set_isa(Isa isa);

/// sum_i x_i * conj(y_i): linear in the first argument.
Complex cdotc(std::span<const Complex> x, std::span<const Complex> y);

/// y += a * x
void caxpy(Complex a, std::span<const Complex> x, std::span<Complex> y);

/// y = A x for a column-major rows x cols matrix.
void cgemv(const Complex* a, std::size_t rows, std::size_t cols,
           std::span<const Complex> x, std::span<Complex> y);

/// s += x x^* for a column-major n x n matrix, n = x.size().
void gram_update(std::span<const Complex> x, Complex* s);

// Direct access to each variant, for equivalence testing.
namespace scalar {
Complex cdotc(std::span<const Complex> x, std::span<const Complex> y);
void caxpy(Complex a, std::span<const Complex> x, std::span<Complex> y);
void cgemv(const Complex* a, std::size_t rows, std::size_t cols,
           std::span<const Complex> x, std::span<Complex> y);
void gram_update(std::span<const Complex> x, Complex* s);
}  // namespace scalar

namespace avx2 {
Complex cdotc(std::span<const Complex> x, std::span<const Complex> y);
void caxpy(Complex a, std::span<const Complex> x, std::span<Complex> y);
void cgemv(const Complex* a, std::size_t rows, std::size_t cols,
           std::span<const Complex> x, std::span<Complex> y);
void gram_update(std::span<const Complex> x, Complex* s);
}  // namespace avx2

}  // namespace dynframe::kernels
