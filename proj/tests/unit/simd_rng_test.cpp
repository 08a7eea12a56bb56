#include <cstring>
#include <random>
#include <vector>

#include <doctest.h>

#include "volterra/rng.hpp"
#include "volterra/simd.hpp"

using namespace volterra;

namespace {

std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (auto& x : v) x = d(gen);
  return v;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_SUITE("simd") {
  TEST_CASE("variants reproduce the scalar reference bit for bit") {
    const simd::KernelTable* avx = simd::avx2_kernels();
    if (avx == nullptr) {
      MESSAGE("AVX2 unavailable; only the scalar table is exercised");
      return;
    }
    const auto& ref = simd::scalar_kernels();
    for (std::size_t n : {1u, 3u, 4u, 7u, 16u, 33u, 130u}) {
      CAPTURE(n);
      const auto a = random_vector(n, 1), b = random_vector(n, 2);
      const double d0 = ref.dot(a.data(), b.data(), n);
      const double d1 = avx->dot(a.data(), b.data(), n);
      CHECK(std::memcmp(&d0, &d1, sizeof d0) == 0);

      const std::size_t rows = n + 3;
      const auto A = random_vector(rows * n, 3);
      const auto x = random_vector(n, 4), v = random_vector(rows, 5);
      std::vector<double> y0(rows), y1(rows), z0(n), z1(n);
      ref.gemv(A.data(), rows, n, x.data(), y0.data());
      avx->gemv(A.data(), rows, n, x.data(), y1.data());
      CHECK(same_bits(y0, y1));
      ref.gemv_t(A.data(), rows, n, v.data(), z0.data());
      avx->gemv_t(A.data(), rows, n, v.data(), z1.data());
      CHECK(same_bits(z0, z1));

      auto L = random_vector(n * n, 6);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) L[i * n + j] = 0.0;
      for (std::size_t cols : {1u, 5u, 12u}) {
        const std::size_t ld = cols + 2;
        const auto Z = random_vector(n * ld, 7);
        std::vector<double> Y0(n * ld, 0.0), Y1(n * ld, 0.0);
        ref.tri_apply(L.data(), n, Z.data(), Y0.data(), cols, ld);
        avx->tri_apply(L.data(), n, Z.data(), Y1.data(), cols, ld);
        CHECK(same_bits(Y0, Y1));
      }
    }
  }

  TEST_CASE("scalar kernels compute the textbook results") {
    const auto& ref = simd::scalar_kernels();
    const std::vector<double> A{1, 2, 3, 4, 5, 6};  // 2 x 3
    const std::vector<double> x{1, 0, -1}, v{1, 1};
    std::vector<double> y(2), z(3);
    ref.gemv(A.data(), 2, 3, x.data(), y.data());
    CHECK(y == std::vector<double>{-2, -2});
    ref.gemv_t(A.data(), 2, 3, v.data(), z.data());
    CHECK(z == std::vector<double>{5, 7, 9});
    const std::vector<double> L{2, 0, 1, 3};
    const std::vector<double> Z{1, 2, 3, 4};
    std::vector<double> Y(4);
    ref.tri_apply(L.data(), 2, Z.data(), Y.data(), 2, 2);
    CHECK(Y == std::vector<double>{2, 4, 10, 14});
  }
}

TEST_SUITE("rng") {
  TEST_CASE("Philox4x32-10 known-answer vectors") {
    using P = Philox4x32;
    CHECK(P::round10({0, 0, 0, 0}, {0, 0}) == P::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(P::round10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          P::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(P::round10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          P::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
  }

  TEST_CASE("streams are addressable and independent of draw counts") {
    NormalStream s(42, 7, stream_tag::joint);
    std::vector<double> a(9), b(4);
    s.fill(a.data(), a.size());
    s.fill(b.data(), b.size());
    for (std::size_t i = 0; i < b.size(); ++i) CHECK(a[i] == b[i]);
    std::vector<double> other(9);
    NormalStream(42, 8, stream_tag::joint).fill(other.data(), other.size());
    CHECK(other != a);
    NormalStream(42, 7, stream_tag::brownian).fill(other.data(), other.size());
    CHECK(other != a);
  }

  TEST_CASE("normal draws have standard moments") {
    const std::size_t n = 400000;
    std::vector<double> v(n);
    NormalStream(2024, 0, 0).fill(v.data(), n);
    double m = 0, m2 = 0, m4 = 0;
    for (double x : v) {
      m += x;
      m2 += x * x;
      m4 += x * x * x * x;
    }
    m /= n;
    m2 /= n;
    m4 /= n;
    CHECK(std::abs(m) < 5.0 / std::sqrt(double(n)));
    CHECK(std::abs(m2 - 1.0) < 5.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(m4 - 3.0) < 5.0 * std::sqrt(96.0 / n));
    CHECK(NormalStream::to_unit(0) > 0.0);
    CHECK(NormalStream::to_unit(~0ULL) < 1.0);
  }
}
