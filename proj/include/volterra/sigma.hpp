#pragma once

#include <cmath>
#include <string_view>

namespace volterra {

enum class SigmaFamily { constant, exponential, shifted_abs, sqrt_linear };

std::string_view to_string(SigmaFamily family) noexcept;
SigmaFamily parse_sigma_family(std::string_view name);

/// Positive volatility function sigma(x).
///   constant:     sigma0
///   exponential:  sigma0 exp(beta x)
///   shifted_abs:  delta + |x|
///   sqrt_linear:  sqrt(c1 + c2 x^2)
struct SigmaSpec {
  SigmaFamily family = SigmaFamily::constant;
  double sigma0 = 0.2;
  double beta = 0.0;
  double delta = 0.2;
  double c1 = 0.04;
  double c2 = 0.0;

  static SigmaSpec constant(double sigma0) { return {SigmaFamily::constant, sigma0}; }
  static SigmaSpec exponential(double sigma0, double beta) { return {SigmaFamily::exponential, sigma0, beta}; }
  static SigmaSpec shifted_abs(double delta) {
    SigmaSpec s;
    s.family = SigmaFamily::shifted_abs;
    s.delta = delta;
    return s;
  }
  static SigmaSpec sqrt_linear(double c1, double c2) {
    SigmaSpec s;
    s.family = SigmaFamily::sqrt_linear;
    s.c1 = c1;
    s.c2 = c2;
    return s;
  }

  double operator()(double x) const noexcept {
    switch (family) {
      case SigmaFamily::constant: return sigma0;
      case SigmaFamily::exponential: return sigma0 * std::exp(beta * x);
      case SigmaFamily::shifted_abs: return delta + std::abs(x);
      case SigmaFamily::sqrt_linear: return std::sqrt(c1 + c2 * x * x);
    }
    return sigma0;
  }

  /// sigma'(x); meaningful only when smooth().
  double derivative(double x) const noexcept {
    switch (family) {
      case SigmaFamily::constant: return 0.0;
      case SigmaFamily::exponential: return beta * sigma0 * std::exp(beta * x);
      case SigmaFamily::shifted_abs: return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
      case SigmaFamily::sqrt_linear: return c2 * x / std::sqrt(c1 + c2 * x * x);
    }
    return 0.0;
  }

  bool smooth() const noexcept { return family != SigmaFamily::shifted_abs; }
  /// sigma(x)^2 <= c1 + c2 x^2 for some constants; false only for exponential with beta != 0.
  bool linear_growth() const noexcept { return family != SigmaFamily::exponential || beta == 0.0; }
  /// Throws ConfigError naming the offending parameter.
  void validate() const;
};

}  // namespace volterra
