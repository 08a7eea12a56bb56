#pragma once

#include <cstddef>
#include <string_view>

namespace volterra::simd {

/// Dense kernels behind runtime dispatch. Every variant reproduces the scalar
/// reference bit for bit: reductions use four interleaved fma accumulators
/// combined as (a0 + a1) + (a2 + a3), then a sequential tail.
struct KernelTable {
  std::string_view name;

  /// Y = L Z for a row-major lower-triangular dim x dim matrix L and column
  /// blocks Z, Y of shape dim x cols stored row-major with leading dimension ld.
  void (*tri_apply)(const double* L, std::size_t dim, const double* Z, double* Y, std::size_t cols,
                    std::size_t ld);
  /// y = A x for row-major A (rows x cols).
  void (*gemv)(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y);
  /// y = A^T v for row-major A (rows x cols); y has cols entries.
  void (*gemv_t)(const double* A, std::size_t rows, std::size_t cols, const double* v, double* y);
  double (*dot)(const double* a, const double* b, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;
/// nullptr when the build or the CPU lacks AVX2 and FMA.
const KernelTable* avx2_kernels() noexcept;

/// Table chosen once per process: AVX2 when available, unless the environment
/// variable VOLTERRA_SIMD=scalar forces the reference path.
const KernelTable& active() noexcept;

}  // namespace volterra::simd
