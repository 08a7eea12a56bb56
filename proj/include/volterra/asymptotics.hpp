#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "volterra/mc_harness.hpp"
#include "volterra/rate_solver.hpp"

namespace volterra {

enum class Regime { small_noise, small_time };
enum class OptionKind { call, put };

std::string_view to_string(Regime regime) noexcept;
Regime parse_regime(std::string_view name);
std::string_view to_string(OptionKind kind) noexcept;

/// Rates below this are treated as zero.
inline constexpr double kDegenerateRate = 1e-10;

/// I_T(y) in the small-noise regime, I-hat(y) in the small-time regime (after the gate).
RateResult regime_rate(const ModelSpec& model, double y, Regime regime, const SolverConfig& config);

/// Limit of eps^{2H} log of the binary price on the ray beyond y: -I.
double binary_asymptote(const ModelSpec& model, double y, Regime regime, const SolverConfig& config = {});

struct OptionAsymptote {
  double value = 0.0;  ///< -I, shared with the binary asymptote
  OptionKind kind = OptionKind::call;
  bool growth_warning = false;  ///< sigma lacks linear growth; hypotheses of the limit fail
};

/// Calls need y > 0 and puts y < 0; anything else throws ConfigError.
OptionAsymptote call_put_asymptote(const ModelSpec& model, double y, Regime regime, OptionKind kind,
                                   const SolverConfig& config = {});

/// |y| / sqrt(2 I). Throws NumericalError when I <= kDegenerateRate.
double implied_vol_limit(const ModelSpec& model, double y, Regime regime, const SolverConfig& config = {});

struct SmileRow {
  double y = 0.0;
  double I = 0.0;
  double I_hat = 0.0;  ///< NaN when the kernel is not self-similar
  double binary = 0.0;
  double ivol_limit = 0.0;
  std::string flag;  ///< call, put, or the reason the row failed
};

struct SmileTable {
  Regime regime = Regime::small_noise;
  bool growth_warning = false;
  std::vector<SmileRow> rows;
};

SmileTable smile(const ModelSpec& model, const std::vector<double>& y_grid, Regime regime,
                 const SolverConfig& config = {});

struct McImpliedVol {
  double strike = 0.0;
  double maturity = 0.0;  ///< Black-Scholes maturity used for the inversion
  double price = 0.0;     ///< call price (puts converted by parity)
  double standard_error = 0.0;
  double implied_vol = 0.0;
};

/// Monte Carlo price at log-moneyness y scale^{1/2-H}, inverted through Black-Scholes.
/// Small noise: X_T^{eps,H} with scale = eps, inverted at maturity eps.
/// Small time: the unscaled model at maturity scale.
McImpliedVol mc_implied_vol(const ModelSpec& model, double y, Regime regime, double scale, std::size_t paths,
                            std::uint64_t seed, std::size_t n_steps, int threads = 1);

}  // namespace volterra
