#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace volterra {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A draw is a
/// pure function of (key, counter), so any path's stream can be regenerated
/// independently of thread assignment.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter round10(Counter ctr, Key key) noexcept {
    for (int r = 0; r < 10; ++r) {
      if (r > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Standard normal stream addressed by (seed, path, tag). Draw k of the stream
/// is fixed regardless of how many draws other streams consume.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t path, std::uint32_t tag) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        path_lo_(static_cast<std::uint32_t>(path)),
        path_hi_(static_cast<std::uint32_t>(path >> 32)),
        tag_(tag) {}

  /// Fills out[0..n) with the stream's first n normals.
  void fill(double* out, std::size_t n) noexcept {
    std::uint32_t block = 0;
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) pair(block++, out + i);
    if (i < n) {
      double last[2];
      pair(block, last);
      out[i] = last[0];
    }
  }

  /// Box-Muller on the two 64-bit halves of one Philox block.
  void pair(std::uint32_t block, double* out) const noexcept {
    const auto r = Philox4x32::round10({block, path_lo_, path_hi_, tag_}, key_);
    const double u1 = to_unit((std::uint64_t{r[0]} << 32) | r[1]);
    const double u2 = to_unit((std::uint64_t{r[2]} << 32) | r[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    out[0] = radius * std::cos(angle);
    out[1] = radius * std::sin(angle);
  }

  /// Uniform in the open interval (0,1).
  static double to_unit(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
  }

 private:
  Philox4x32::Key key_;
  std::uint32_t path_lo_;
  std::uint32_t path_hi_;
  std::uint32_t tag_;
};

/// Stream tags separate the independent noise sources of one path.
namespace stream_tag {
inline constexpr std::uint32_t joint = 0;     // (B, Bhat) Gaussian vector
inline constexpr std::uint32_t brownian = 1;  // W increments
inline constexpr std::uint32_t start = 2;     // multistart perturbations
}  // namespace stream_tag

}  // namespace volterra
