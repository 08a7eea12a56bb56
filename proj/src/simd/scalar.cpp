#include <cmath>

#include "volterra/simd.hpp"

namespace volterra::simd {
namespace {

double dot4(const double* a, const double* b, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int l = 0; l < 4; ++l) acc[l] = std::fma(a[i + l], b[i + l], acc[l]);
  }
  double sum = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (; i < n; ++i) sum = std::fma(a[i], b[i], sum);
  return sum;
}

void tri_apply(const double* L, std::size_t dim, const double* Z, double* Y, std::size_t cols, std::size_t ld) {
  for (std::size_t i = 0; i < dim; ++i) {
    double* y = Y + i * ld;
    for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
    const double* row = L + i * dim;
    for (std::size_t j = 0; j <= i; ++j) {
      const double l = row[j];
      const double* z = Z + j * ld;
      for (std::size_t c = 0; c < cols; ++c) y[c] = std::fma(l, z[c], y[c]);
    }
  }
}

void gemv(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot4(A + r * cols, x, cols);
}

void gemv_t(const double* A, std::size_t rows, std::size_t cols, const double* v, double* y) {
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double s = v[r];
    const double* a = A + r * cols;
    for (std::size_t c = 0; c < cols; ++c) y[c] = std::fma(a[c], s, y[c]);
  }
}

const KernelTable kScalar{"scalar", tri_apply, gemv, gemv_t, dot4};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

}  // namespace volterra::simd
