#include <atomic>
#include <cstdlib>
#include <string>

#include "dynframe/error.hpp"
#include "dynframe/kernels.hpp"

namespace dynframe::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(DYNFRAME_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() {
  const bool have = cpu_has_avx2();
  if (const char* env = std::getenv("DYNFRAME_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Isa::Scalar;
    if (v == "avx2" && have) return Isa::Avx2;
  }
  return have ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool avx2_available() {
  static const bool have = cpu_has_avx2();
  return have;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

Isa set_isa(Isa isa) {
  if (isa == Isa::Avx2 && !avx2_available()) isa = Isa::Scalar;
  current().store(isa, std::memory_order_relaxed);
  return isa;
}

Complex cdotc(std::span<const Complex> x, std::span<const Complex> y) {
  if (x.size() != y.size()) throw DimMismatch("cdotc: length mismatch");
  return active_isa() == Isa::Avx2 ? avx2::cdotc(x, y) : scalar::cdotc(x, y);
}

void caxpy(Complex a, std::span<const Complex> x, std::span<Complex> y) {
  if (x.size() != y.size()) throw DimMismatch("caxpy: length mismatch");
  if (active_isa() == Isa::Avx2) {
    avx2::caxpy(a, x, y);
  } else {
    scalar::caxpy(a, x, y);
  }
}

void cgemv(const Complex* a, std::size_t rows, std::size_t cols,
           std::span<const Complex> x, std::span<Complex> y) {
  if (x.size() != cols || y.size() != rows) throw DimMismatch("cgemv: shape mismatch");
  if (active_isa() == Isa::Avx2) {
    avx2::cgemv(a, rows, cols, x, y);
  } else {
    scalar::cgemv(a, rows, cols, x, y);
  }
}

void gram_update(std::span<const Complex> x, Complex* s) {
  if (active_isa() == Isa::Avx2) {
    avx2::gram_update(x, s);
  } else {
    scalar::gram_update(x, s);
  }
}

}  // namespace dynframe::kernels
