#include "volterra/asymptotics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "volterra/black_scholes.hpp"
#include "volterra/error.hpp"

namespace volterra {

std::string_view to_string(Regime regime) noexcept {
  return regime == Regime::small_noise ? "small_noise" : "small_time";
}

Regime parse_regime(std::string_view name) {
  if (name == "small_noise") return Regime::small_noise;
  if (name == "small_time") return Regime::small_time;
  throw ConfigError("unknown regime '" + std::string(name) + "' (expected small_noise or small_time)");
}

std::string_view to_string(OptionKind kind) noexcept { return kind == OptionKind::call ? "call" : "put"; }

namespace {

void check_y(double y) {
  if (y == 0.0 || !std::isfinite(y)) throw ConfigError("y must be finite and non-zero");
}

}  // namespace

RateResult regime_rate(const ModelSpec& model, double y, Regime regime, const SolverConfig& config) {
  check_y(y);
  if (regime == Regime::small_time) check_self_similarity_gate(model);
  const Kernel kernel = model.make_kernel();
  if (regime == Regime::small_noise) return rate_function(kernel, model.sigma, model.rho, y, config);
  return rate_function_hat(kernel, model.sigma, model.rho, model.H, y, config);
}

double binary_asymptote(const ModelSpec& model, double y, Regime regime, const SolverConfig& config) {
  return -regime_rate(model, y, regime, config).value;
}

OptionAsymptote call_put_asymptote(const ModelSpec& model, double y, Regime regime, OptionKind kind,
                                   const SolverConfig& config) {
  check_y(y);
  if ((kind == OptionKind::call) != (y > 0.0)) {
    std::ostringstream msg;
    msg << to_string(kind) << " asymptote needs y " << (kind == OptionKind::call ? "> 0" : "< 0") << ", got " << y;
    throw ConfigError(msg.str());
  }
  return {binary_asymptote(model, y, regime, config), kind, model.growth_warning()};
}

double implied_vol_limit(const ModelSpec& model, double y, Regime regime, const SolverConfig& config) {
  const double rate = regime_rate(model, y, regime, config).value;
  if (!(rate > kDegenerateRate)) {
    std::ostringstream msg;
    msg << "rate " << rate << " at y = " << y << " is degenerate; implied vol limit undefined";
    throw NumericalError(msg.str());
  }
  return std::abs(y) / std::sqrt(2.0 * rate);
}

SmileTable smile(const ModelSpec& model, const std::vector<double>& y_grid, Regime regime,
                 const SolverConfig& config) {
  model.validate();
  SmileTable table;
  table.regime = regime;
  table.growth_warning = model.growth_warning();
  const Kernel kernel = model.make_kernel();
  bool self_similar = true;
  try {
    check_self_similarity_gate(model);
  } catch (const Error&) {
    if (regime == Regime::small_time) throw;
    self_similar = false;
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double y : y_grid) {
    SmileRow row{y, nan, nan, nan, nan, ""};
    if (y == 0.0 || !std::isfinite(y)) {
      row.flag = "y_zero";
      table.rows.push_back(row);
      continue;
    }
    try {
      const RateResult small_noise = rate_function(kernel, model.sigma, model.rho, y, config);
      row.I = small_noise.value;
      bool converged = small_noise.converged;
      if (self_similar) {
        const RateResult hat = rate_function_hat(kernel, model.sigma, model.rho, model.H, y, config);
        row.I_hat = hat.value;
        if (regime == Regime::small_time) converged = hat.converged;
      }
      const double rate = regime == Regime::small_noise ? row.I : row.I_hat;
      row.binary = -rate;
      if (!converged) {
        row.flag = "not_converged";
      } else if (!(rate > kDegenerateRate)) {
        row.flag = "degenerate";
      } else {
        row.ivol_limit = std::abs(y) / std::sqrt(2.0 * rate);
        row.flag = std::string(to_string(y > 0.0 ? OptionKind::call : OptionKind::put));
      }
    } catch (const NumericalError&) {
      row.flag = "failed";
    }
    table.rows.push_back(row);
  }
  return table;
}

McImpliedVol mc_implied_vol(const ModelSpec& model, double y, Regime regime, double scale, std::size_t paths,
                            std::uint64_t seed, std::size_t n_steps, int threads) {
  check_y(y);
  if (!(scale > 0.0 && scale <= 1.0)) throw ConfigError("scale must lie in (0, 1]");
  if (paths < 2) throw ConfigError("paths must be at least 2");
  std::vector<double> x;
  McImpliedVol out;
  if (regime == Regime::small_noise) {
    x = simulate_scaled_logprice(model, scale, PathGrid::uniform(model.T, n_steps), paths, seed, true, threads);
    out.maturity = scale;
  } else {
    check_self_similarity_gate(model);
    const double t = scale * model.T;
    x = simulate_scaled_logprice(model, 1.0, PathGrid::uniform(t, n_steps), paths, seed, true, threads);
    out.maturity = t;
  }
  const double moneyness = y * std::pow(out.maturity, 0.5 - model.H);
  out.strike = model.s0 * std::exp(moneyness);
  const bool call = y > 0.0;
  // Blockwise accumulation keeps the sum order fixed.
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t begin = 0; begin < paths; begin += kPathBlock) {
    const std::size_t end = std::min(paths, begin + kPathBlock);
    double s = 0.0, s2 = 0.0;
    for (std::size_t p = begin; p < end; ++p) {
      const double st = std::exp(x[p]);
      const double payoff = call ? std::max(st - out.strike, 0.0) : std::max(out.strike - st, 0.0);
      s += payoff;
      s2 += payoff * payoff;
    }
    sum += s;
    sum_sq += s2;
  }
  const double n = static_cast<double>(paths);
  const double mean = sum / n;
  out.standard_error = std::sqrt(std::max(sum_sq / n - mean * mean, 0.0) / (n - 1.0));
  out.price = call ? mean : mean + model.s0 - out.strike;
  out.implied_vol = bs_implied_vol(out.price, model.s0, out.strike, out.maturity);
  return out;
}

}  // namespace volterra
