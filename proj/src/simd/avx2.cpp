#include <immintrin.h>

#include <cmath>

#include "volterra/simd.hpp"

namespace volterra::simd {
namespace {

inline double hsum(__m256d v) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, v);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  double sum = hsum(acc);
  for (; i < n; ++i) sum = std::fma(a[i], b[i], sum);
  return sum;
}

void tri_apply(const double* L, std::size_t dim, const double* Z, double* Y, std::size_t cols, std::size_t ld) {
  for (std::size_t i = 0; i < dim; ++i) {
    double* y = Y + i * ld;
    const double* row = L + i * dim;
    std::size_t c = 0;
    // Four column vectors at a time keep 16 outputs in registers across j.
    for (; c + 16 <= cols; c += 16) {
      __m256d y0 = _mm256_setzero_pd(), y1 = _mm256_setzero_pd();
      __m256d y2 = _mm256_setzero_pd(), y3 = _mm256_setzero_pd();
      for (std::size_t j = 0; j <= i; ++j) {
        const __m256d l = _mm256_broadcast_sd(row + j);
        const double* z = Z + j * ld + c;
        y0 = _mm256_fmadd_pd(l, _mm256_loadu_pd(z), y0);
        y1 = _mm256_fmadd_pd(l, _mm256_loadu_pd(z + 4), y1);
        y2 = _mm256_fmadd_pd(l, _mm256_loadu_pd(z + 8), y2);
        y3 = _mm256_fmadd_pd(l, _mm256_loadu_pd(z + 12), y3);
      }
      _mm256_storeu_pd(y + c, y0);
      _mm256_storeu_pd(y + c + 4, y1);
      _mm256_storeu_pd(y + c + 8, y2);
      _mm256_storeu_pd(y + c + 12, y3);
    }
    for (; c + 4 <= cols; c += 4) {
      __m256d acc = _mm256_setzero_pd();
      for (std::size_t j = 0; j <= i; ++j)
        acc = _mm256_fmadd_pd(_mm256_broadcast_sd(row + j), _mm256_loadu_pd(Z + j * ld + c), acc);
      _mm256_storeu_pd(y + c, acc);
    }
    for (; c < cols; ++c) {
      double acc = 0.0;
      for (std::size_t j = 0; j <= i; ++j) acc = std::fma(row[j], Z[j * ld + c], acc);
      y[c] = acc;
    }
  }
}

void gemv(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot(A + r * cols, x, cols);
}

void gemv_t(const double* A, std::size_t rows, std::size_t cols, const double* v, double* y) {
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const __m256d s = _mm256_set1_pd(v[r]);
    const double* a = A + r * cols;
    std::size_t c = 0;
    for (; c + 4 <= cols; c += 4)
      _mm256_storeu_pd(y + c, _mm256_fmadd_pd(_mm256_loadu_pd(a + c), s, _mm256_loadu_pd(y + c)));
    for (; c < cols; ++c) y[c] = std::fma(a[c], v[r], y[c]);
  }
}

}  // namespace

extern const KernelTable kAvx2Table;
const KernelTable kAvx2Table{"avx2", tri_apply, gemv, gemv_t, dot};

}  // namespace volterra::simd
